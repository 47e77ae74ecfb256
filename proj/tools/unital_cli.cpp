// Command-line front end: construction, property verification, subunital
// search, standardness certification, and the full verification suite.
// Exit codes: 0 pass/complete, 1 failure or invalid input, 2 search capped.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "unitals/embed.hpp"
#include "unitals/verify.hpp"

using namespace unitals;
using nlohmann::json;

namespace {

struct FieldArgs {
  uint32_t q = 0;
  uint32_t p = 0, n = 0;
  std::string modulus;

  void attach(CLI::App* cmd) {
    cmd->add_option("--q", q, "field order q (prime power); C = F_{q^2}");
    cmd->add_option("--p", p, "characteristic (with --n)");
    cmd->add_option("--n", n, "extension exponent, q = p^n (with --p)");
    cmd->add_option("--modulus", modulus,
                    "modulus override for C, ascending coefficients, e.g. 1,1,1");
  }

  QuadExtension resolve() const {
    uint32_t pp = p, nn = n;
    if (q) {
      if (!prime_power(q, pp, nn))
        throw std::invalid_argument(std::to_string(q) + " is not a prime power");
    }
    if (!pp || !nn)
      throw std::invalid_argument("specify --q or both --p and --n");
    if (modulus.empty()) return make_quad_ext(pp, nn);
    std::vector<uint32_t> coeffs;
    std::istringstream ms(modulus);
    std::string tok;
    while (std::getline(ms, tok, ',')) coeffs.push_back(std::stoul(tok));
    return make_quad_ext(pp, nn, &coeffs);
  }
};

void write_output(const std::string& out_path, const std::string& data) {
  if (out_path.empty() || out_path == "-") {
    std::fwrite(data.data(), 1, data.size(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + out_path);
  f.write(data.data(), std::streamsize(data.size()));
}

ScanOptions scan_options(const std::string& mode, uint64_t count,
                         std::optional<uint64_t> seed) {
  ScanOptions opts;
  if (mode == "sample") {
    if (!seed)
      throw std::invalid_argument("--seed is mandatory when sampling");
    opts.mode = ScanMode::sample;
    opts.sample_count = count ? count : 10000;
    opts.seed = *seed;
  } else if (mode == "exhaustive") {
    opts.mode = ScanMode::exhaustive;
  } else {
    throw std::invalid_argument("unknown scan mode " + mode);
  }
  return opts;
}

json line_profile_report(const HermitianUnital& u) {
  uint64_t tangents = 0, secants = 0, violations = 0;
  for (const auto& line : enumerate_lines(u.ext.C)) {
    uint32_t count = 0;
    for (const auto& pt : points_on_line(u.ext.C, line))
      if (u.point_index(pt)) ++count;
    if (count == 1) ++tangents;
    else if (count == u.q + 1) ++secants;
    else if (count != 0) ++violations;
  }
  return {{"property", "line-profile"},
          {"tangents", tangents},
          {"secants", secants},
          {"violations", violations},
          {"pass", violations == 0 && tangents == u.v()}};
}

json form_report(const HermitianUnital& u) {
  uint64_t checked = 0, mismatches = 0;
  for (const auto& pt : enumerate_points(u.ext.C)) {
    std::array<Fe, 3> v = {pt.x, pt.y, pt.z};
    bool isotropic = u.ext.hermitian_form(v, v).is_zero();
    if (isotropic != u.point_index(pt).has_value()) ++mismatches;
    ++checked;
  }
  return {{"property", "form-consistency"},
          {"points_checked", checked},
          {"mismatches", mismatches},
          {"pass", mismatches == 0}};
}

json baer_report(const HermitianUnital& u) {
  uint64_t failures = 0;
  for (uint32_t b = 0; b < u.b(); ++b)
    if (!baer_check(u, b)) ++failures;
  return {{"property", "baer"},
          {"blocks", u.b()},
          {"failures", failures},
          {"pass", failures == 0}};
}

int cmd_search_run(const FieldArgs& fargs, uint32_t sub, const std::string& mode,
                   uint64_t count, std::optional<uint64_t> seed,
                   uint32_t workers, const std::string& out_path) {
  auto ext = fargs.resolve();
  auto u = build_unital(ext);
  SearchOptions opts;
  opts.workers = workers;
  if (seed) opts.seed = *seed;
  if (mode == "exhaustive") opts.mode = SearchMode::exhaustive;
  else if (mode == "reduced") opts.mode = SearchMode::reduced;
  else if (mode == "capped") {
    opts.mode = SearchMode::capped;
    opts.cap = count ? count : 1;
  } else {
    throw std::invalid_argument("unknown search mode " + mode);
  }

  auto res = find_subunitals(u, sub, opts);

  json doc;
  doc["ambient"] = {{"q", u.q}, {"p", ext.p()}, {"n", ext.n()}};
  doc["sub_order"] = sub;
  doc["mode_requested"] = mode;
  doc["mode_used"] =
      res.mode_used == SearchMode::reduced ? "reduced" : mode == "capped"
          ? "capped"
          : "exhaustive";
  if (res.justification)
    doc["justification"] = json::parse(justification_json(*res.justification));
  doc["capped"] = res.capped;
  doc["nodes_visited"] = res.nodes_visited;
  doc["certificates"] = json::array();
  for (const auto& cert : res.certificates) {
    json entry = json::parse(certificate_json(cert));
    entry["standard"] = json::parse(check_standard_json(check_standard(u, cert)));
    entry["disjointness"] =
        json::parse(disjointness_json(disjointness_check(u, cert)));
    doc["certificates"].push_back(entry);
  }
  write_output(out_path, doc.dump(2) + "\n");
  return res.capped ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact toolkit for finite hermitian unitals and their subunitals"};
  app.require_subcommand(1);

  // ---- build / export -----------------------------------------------------
  FieldArgs build_args;
  std::string build_format = "text";
  std::string build_out;
  auto* build_cmd =
      app.add_subcommand("build", "construct a unital and write its export");
  build_args.attach(build_cmd);
  build_cmd->add_option("--format", build_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  build_cmd->add_option("--out", build_out, "output path (default stdout)");

  FieldArgs export_args;
  std::string export_format = "text";
  std::string export_out;
  auto* export_cmd =
      app.add_subcommand("export", "write the deterministic unital export");
  export_args.attach(export_cmd);
  export_cmd->add_option("--format", export_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  export_cmd->add_option("--out", export_out, "output path (default stdout)");

  // ---- check ---------------------------------------------------------------
  FieldArgs check_args;
  std::string check_props = "all";
  std::string check_mode = "exhaustive";
  uint64_t check_count = 0;
  std::optional<uint64_t> check_seed;
  std::string check_out;
  auto* check_cmd =
      app.add_subcommand("check", "verify structural properties, JSON report");
  check_args.attach(check_cmd);
  check_cmd->add_option(
      "--props", check_props,
      "comma list: all,onan,trans,closure,tangent,baer,profile,form,wilbrink");
  check_cmd->add_option("--mode", check_mode, "exhaustive or sample");
  check_cmd->add_option("--count", check_count, "sample count");
  check_cmd->add_option("--seed", check_seed, "sampling seed");
  check_cmd->add_option("--out", check_out, "report path (default stdout)");

  // ---- search ----------------------------------------------------------
  FieldArgs search_args;
  uint32_t search_sub = 2;
  std::string search_mode = "exhaustive";
  uint64_t search_count = 0;
  std::optional<uint64_t> search_seed;
  uint32_t search_workers = std::thread::hardware_concurrency();
  std::string search_out;
  auto* search_cmd = app.add_subcommand(
      "search", "search for subunitals; certificates with verdicts");
  search_args.attach(search_cmd);
  search_cmd->add_option("--sub", search_sub, "subunital order q'")->required();
  search_cmd->add_option("--mode", search_mode,
                         "exhaustive, reduced, or capped");
  search_cmd->add_option("--count", search_count, "capped mode limit");
  search_cmd->add_option("--seed", search_seed, "justification sampling seed");
  search_cmd->add_option("--workers", search_workers, "parallel shards");
  search_cmd->add_option("--out", search_out, "output path (default stdout)");

  // ---- standardness -----------------------------------------------------
  FieldArgs std_args;
  std::string std_in;
  std::string std_out;
  auto* std_cmd = app.add_subcommand(
      "standardness", "re-certify certificates from a search output file");
  std_args.attach(std_cmd);
  std_cmd->add_option("--in", std_in, "search output JSON")->required();
  std_cmd->add_option("--out", std_out, "witness report path (default stdout)");

  // ---- translations -------------------------------------------------------
  FieldArgs trans_args;
  std::optional<uint32_t> trans_point;
  std::string trans_out;
  auto* trans_cmd = app.add_subcommand(
      "translations", "translation groups per center, JSON report");
  trans_args.attach(trans_cmd);
  trans_cmd->add_option("--point", trans_point, "restrict to one center");
  trans_cmd->add_option("--out", trans_out, "report path (default stdout)");

  // ---- verify-paper -------------------------------------------------------
  std::vector<std::string> verify_only;
  std::optional<uint64_t> verify_seed;
  uint32_t verify_workers = std::thread::hardware_concurrency();
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand(
      "verify-paper", "run the full verification suite, one line per criterion");
  verify_cmd->add_option("--only", verify_only, "criterion ids, e.g. A3");
  verify_cmd->add_option("--seed", verify_seed, "seed for sampled criteria");
  verify_cmd->add_option("--workers", verify_workers, "parallel shards");
  verify_cmd->add_option("--out", verify_out, "summary JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*build_cmd || *export_cmd) {
      bool is_build = bool(*build_cmd);
      const FieldArgs& fargs = is_build ? build_args : export_args;
      const std::string& fmt = is_build ? build_format : export_format;
      const std::string& out = is_build ? build_out : export_out;
      auto ext = fargs.resolve();
      auto u = build_unital(ext);
      auto data = export_unital(
          u, fmt == "json" ? ExportFormat::json : ExportFormat::text);
      if (is_build && (out.empty() || out == "-")) {
        // Keep the export byte-exact on stdout; summary goes to stderr.
        std::fwrite(data.data(), 1, data.size(), stdout);
        std::fprintf(stderr, "v=%u b=%u\n", u.v(), u.b());
      } else {
        write_output(out, data);
        if (is_build) std::printf("v=%u b=%u\n", u.v(), u.b());
      }
      return 0;
    }

    if (*check_cmd) {
      auto ext = check_args.resolve();
      auto u = build_unital(ext);
      auto opts = scan_options(check_mode, check_count, check_seed);

      std::set<std::string> props;
      {
        std::istringstream ps(check_props);
        std::string tok;
        while (std::getline(ps, tok, ',')) props.insert(tok);
      }
      bool all = props.count("all") > 0;
      auto want = [&](const char* name) { return all || props.count(name); };

      json doc;
      doc["params"] = {{"q", u.q}, {"p", ext.p()}, {"n", ext.n()}};
      bool pass = true;
      auto add = [&](const char* key, json rep) {
        pass = pass && rep.value("pass", false);
        doc["reports"][key] = std::move(rep);
      };

      if (want("onan")) {
        auto rep = find_onan_configs(LinearSpace::from_unital(u), opts);
        json jr = json::parse(report_json(rep));
        jr["pass"] = rep.empty();
        add("onan", jr);
      }
      if (want("trans")) {
        auto rep = check_translation_transitivity(u);
        json jr = json::parse(report_json(rep));
        bool orders_ok = true;
        for (uint32_t o : rep.group_order) orders_ok &= (o == u.q);
        jr["orders_all_q"] = orders_ok;
        jr["pass"] = rep.pass() && orders_ok;
        add("trans", jr);
      }
      if (want("closure")) {
        auto rep = check_translation_closure(u, opts);
        json jr = json::parse(report_json(rep, "translation-closure"));
        jr["pass"] = rep.pass();
        add("closure", jr);
      }
      if (want("tangent")) {
        auto rep = check_tangent_meet(u, opts);
        json jr = json::parse(report_json(rep));
        jr["pass"] = rep.pass();
        add("tangent", jr);
      }
      if (want("baer")) add("baer", baer_report(u));
      if (want("profile")) add("profile", line_profile_report(u));
      if (want("form")) add("form", form_report(u));
      if (want("wilbrink")) {
        auto rep = wilbrink_report(u, opts);
        json jr = json::parse(report_json(rep));
        jr["pass"] = rep.condition_I && rep.condition_II.value_or(false);
        add("wilbrink", jr);
      }
      doc["pass"] = pass;
      write_output(check_out, doc.dump(2) + "\n");
      return pass ? 0 : 1;
    }

    if (*search_cmd) {
      return cmd_search_run(search_args, search_sub, search_mode, search_count,
                            search_seed, search_workers, search_out);
    }

    if (*std_cmd) {
      std::ifstream f(std_in);
      if (!f) throw std::runtime_error("cannot open " + std_in);
      json doc = json::parse(f);
      FieldArgs fargs = std_args;
      if (!fargs.q && !fargs.p && doc.contains("ambient")) {
        fargs.p = doc["ambient"]["p"].get<uint32_t>();
        fargs.n = doc["ambient"]["n"].get<uint32_t>();
      }
      auto ext = fargs.resolve();
      auto u = build_unital(ext);

      json out;
      out["ambient"] = {{"q", u.q}, {"p", ext.p()}, {"n", ext.n()}};
      out["results"] = json::array();
      bool all_standard = true;
      for (const auto& entry : doc["certificates"]) {
        std::vector<uint32_t> pts =
            entry["points"].get<std::vector<uint32_t>>();
        uint32_t order = entry["order"].get<uint32_t>();
        auto cert = certify_subunital(u, pts, order);
        auto cs = check_standard(u, cert);
        all_standard &= cs.standard();
        json r = json::parse(check_standard_json(cs));
        r["points"] = cert.points;
        out["results"].push_back(std::move(r));
      }
      out["all_standard"] = all_standard;
      write_output(std_out, out.dump(2) + "\n");
      return all_standard ? 0 : 1;
    }

    if (*trans_cmd) {
      auto ext = trans_args.resolve();
      auto u = build_unital(ext);
      json doc;
      doc["params"] = {{"q", u.q}, {"p", ext.p()}, {"n", ext.n()}};
      doc["groups"] = json::array();
      uint32_t lo = trans_point.value_or(0);
      uint32_t hi = trans_point ? *trans_point + 1 : u.v();
      if (lo >= u.v()) throw std::invalid_argument("point index out of range");
      bool all_order_q = true;
      for (uint32_t z = lo; z < hi; ++z) {
        auto g = translations_at(u, z);
        all_order_q &= (g.order() == u.q);
        json lam = json::array();
        for (const auto& t : g.elements) lam.push_back(t.lambda.code);
        doc["groups"].push_back(
            {{"center", z}, {"order", g.order()}, {"lambdas", lam}});
      }
      doc["all_order_q"] = all_order_q;
      write_output(trans_out, doc.dump(2) + "\n");
      return 0;
    }

    if (*verify_cmd) {
      SuiteOptions opts;
      if (verify_seed) opts.seed = *verify_seed;
      opts.only = verify_only;
      opts.workers = verify_workers == 0 ? 1 : verify_workers;
      auto res = run_verification_suite(opts);
      std::fputs(format_suite_table(res).c_str(), stdout);
      if (!verify_out.empty()) write_output(verify_out, res.report_json + "\n");
      return res.all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
