#include "unitals/verify.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace unitals {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Context {
  uint64_t seed = 0;
  uint32_t workers = 2;
  std::map<uint32_t, HermitianUnital> unitals;  // by q
  std::map<uint32_t, QuadExtension> exts;       // by q

  const QuadExtension& ext(uint32_t q) {
    auto it = exts.find(q);
    if (it != exts.end()) return it->second;
    uint32_t p = 0, n = 0;
    prime_power(q, p, n);
    return exts.emplace(q, make_quad_ext(p, n)).first->second;
  }
  const HermitianUnital& unital(uint32_t q) {
    auto it = unitals.find(q);
    if (it != unitals.end()) return it->second;
    return unitals.emplace(q, build_unital(ext(q))).first->second;
  }
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<json(Context&, bool&)> run;
};

json criterion_a1(Context& ctx, bool& pass) {
  json out;
  pass = true;
  for (uint32_t q : {2u, 3u, 4u, 8u}) {
    const auto& u = ctx.unital(q);
    uint64_t expected_v = uint64_t(q) * q * q + 1;
    uint64_t expected_b = uint64_t(q) * q * (uint64_t(q) * q - q + 1);
    bool ok = u.v() == expected_v && u.b() == expected_b;
    for (const auto& blk : u.blocks) ok &= (blk.size() == q + 1);
    // Every pair on exactly one block.
    for (uint32_t i = 0; i < u.v() && ok; ++i)
      for (uint32_t j = i + 1; j < u.v(); ++j) {
        uint32_t b = u.pair_block(i, j);
        if (b == UINT32_MAX ||
            !std::binary_search(u.blocks[b].begin(), u.blocks[b].end(), i) ||
            !std::binary_search(u.blocks[b].begin(), u.blocks[b].end(), j)) {
          ok = false;
          break;
        }
      }
    out["q" + std::to_string(q)] = {{"v", u.v()}, {"b", u.b()}, {"ok", ok}};
    pass &= ok;
  }
  return out;
}

json criterion_a2(Context& ctx, bool& pass) {
  json out;
  pass = true;
  for (uint32_t q : {2u, 3u, 4u}) {
    const auto& u = ctx.unital(q);
    uint64_t tangent_lines = 0, secant_lines = 0;
    bool profile_ok = true, tangent_ok = true;
    std::set<uint64_t> tangent_keys;
    for (const auto& line : enumerate_lines(u.ext.C)) {
      uint32_t count = 0;
      uint32_t last = 0;
      for (const auto& pt : points_on_line(u.ext.C, line)) {
        if (auto idx = u.point_index(pt)) {
          ++count;
          last = *idx;
        }
      }
      if (count == 1) {
        ++tangent_lines;
        tangent_keys.insert(line.key());
        tangent_ok &= (line == u.tangent_at(last));
      } else if (count == q + 1) {
        ++secant_lines;
      } else if (count != 0) {
        profile_ok = false;
      }
    }
    bool ok = profile_ok && tangent_ok && tangent_lines == u.v() &&
              tangent_keys.size() == u.v();
    out["q" + std::to_string(q)] = {{"tangents", tangent_lines},
                                    {"secants", secant_lines},
                                    {"ok", ok}};
    pass &= ok;
  }
  return out;
}

json criterion_a3(Context& ctx, bool& pass) {
  json out;
  pass = true;
  for (uint32_t q : {2u, 3u, 4u}) {
    const auto& u = ctx.unital(q);
    uint64_t checked = 0;
    bool ok = true;
    for (const auto& pt : enumerate_points(u.ext.C)) {
      std::array<Fe, 3> v = {pt.x, pt.y, pt.z};
      bool isotropic = u.ext.hermitian_form(v, v).is_zero();
      bool member = u.point_index(pt).has_value();
      ok &= (isotropic == member);
      ++checked;
    }
    out["q" + std::to_string(q)] = {{"points_checked", checked}, {"ok", ok}};
    pass &= ok;
  }
  return out;
}

json criterion_a4(Context& ctx, bool& pass) {
  json out;
  pass = true;
  for (uint32_t q : {2u, 3u, 4u}) {
    const auto& u = ctx.unital(q);
    auto rep = find_onan_configs(LinearSpace::from_unital(u));
    out["q" + std::to_string(q)] = {
        {"configurations_checked", rep.configurations_checked},
        {"found", rep.found.size()}};
    pass &= rep.empty();
  }
  {
    const auto& u = ctx.unital(8);
    ScanOptions opts{ScanMode::sample, 100000, ctx.seed};
    auto rep = find_onan_configs(LinearSpace::from_unital(u), opts);
    out["q8"] = {{"configurations_checked", rep.configurations_checked},
                 {"found", rep.found.size()},
                 {"seed", ctx.seed}};
    pass &= rep.empty();
  }
  return out;
}

json criterion_a5(Context& ctx, bool& pass) {
  json out;
  pass = true;
  for (uint32_t q : {2u, 3u, 4u}) {
    const auto& u = ctx.unital(q);
    auto rep = check_translation_transitivity(u);
    bool orders_ok = true;
    for (uint32_t o : rep.group_order) orders_ok &= (o == q);
    bool ok = rep.pass() && orders_ok;
    out["q" + std::to_string(q)] = {{"failures", rep.failures.size()},
                                    {"orders_all_q", orders_ok},
                                    {"ok", ok}};
    pass &= ok;
  }
  return out;
}

json criterion_a6(Context& ctx, bool& pass) {
  json out;
  pass = true;
  for (uint32_t q : {2u, 3u}) {
    const auto& u = ctx.unital(q);
    auto tra = check_translation_closure(u);
    auto tan = check_tangent_meet(u);
    bool ok = tra.pass() && tan.pass();
    out["q" + std::to_string(q)] = {
        {"closure_checked", tra.configurations_checked},
        {"tangent_checked", tan.configurations_checked},
        {"ok", ok}};
    pass &= ok;
  }
  {
    const auto& u = ctx.unital(4);
    ScanOptions opts{ScanMode::sample, 1000, ctx.seed};
    auto tra = check_translation_closure(u, opts);
    auto tan = check_tangent_meet(u, opts);
    bool ok = tra.pass() && tan.pass() && tra.configurations_checked >= 1000 &&
              tan.configurations_checked >= 1000;
    out["q4"] = {{"closure_checked", tra.configurations_checked},
                 {"tangent_checked", tan.configurations_checked},
                 {"seed", ctx.seed},
                 {"ok", ok}};
    pass &= ok;
  }
  return out;
}

json criterion_a7(Context& ctx, bool& pass) {
  json out;
  pass = true;
  for (uint32_t q : {2u, 3u, 4u}) {
    const auto& u = ctx.unital(q);
    bool ok = true;
    for (uint32_t b = 0; b < u.b(); ++b) ok &= baer_check(u, b);
    out["q" + std::to_string(q)] = {{"blocks", u.b()}, {"ok", ok}};
    pass &= ok;
  }
  return out;
}

json criterion_a8(Context& ctx, bool& pass) {
  json out;
  SearchOptions opts;
  opts.workers = ctx.workers;
  auto r16 = find_subunitals(ctx.unital(4), 2, opts);
  auto r9 = find_subunitals(ctx.unital(3), 2, opts);
  out["F16_F4"] = {{"certificates", r16.certificates.size()},
                   {"nodes", r16.nodes_visited}};
  out["F9_F3"] = {{"certificates", r9.certificates.size()},
                  {"nodes", r9.nodes_visited}};
  pass = r16.certificates.empty() && r9.certificates.empty();
  return out;
}

json criterion_a9(Context& ctx, bool& pass) {
  json out;
  const auto& big = ctx.unital(8);
  auto small = ctx.ext(2);

  // Existence: every field-extension embedding produces a valid order-2
  // subunital.
  auto etas = enumerate_ext_embeddings(small, big.ext);
  out["embeddings"] = etas.size();
  bool existence = etas.size() == 2;
  json eta_certs = json::array();
  std::vector<SubunitalCertificate> all_certs;
  for (const auto& eta : etas) {
    auto cert = standard_subunital(big, eta);
    existence &= (cert.order == 2 && cert.points.size() == 9);
    eta_certs.push_back({{"eta", eta.eta.gen_image.code},
                         {"points", cert.points}});
    all_certs.push_back(std::move(cert));
  }
  out["eta_subunitals"] = eta_certs;

  // Search: reduced mode must produce certificates, all standard.
  SearchOptions sopts;
  sopts.mode = SearchMode::reduced;
  sopts.seed = ctx.seed;
  sopts.workers = ctx.workers;
  auto search = find_subunitals(big, 2, sopts);
  out["search_mode_used"] =
      search.mode_used == SearchMode::reduced ? "reduced" : "exhaustive-fallback";
  if (search.justification)
    out["justification"] = json::parse(justification_json(*search.justification));
  out["search_certificates"] = search.certificates.size();
  bool found_any = !search.certificates.empty();
  for (auto& c : search.certificates) all_certs.push_back(c);

  bool all_standard = true;
  uint64_t frames = 0;
  for (const auto& c : all_certs) {
    auto cs = check_standard(big, c);
    all_standard &= cs.standard();
    frames += cs.frames_tried;
  }
  out["standardness_frames_tried"] = frames;
  out["all_standard"] = all_standard;

  bool disjoint_ok = true;
  uint64_t pairs = 0;
  for (const auto& c : all_certs) {
    auto d = disjointness_check(big, c);
    disjoint_ok &= d.pass();
    pairs += d.pairs_checked;
  }
  out["disjoint_pairs_checked"] = pairs;
  out["disjointness_ok"] = disjoint_ok;

  pass = existence && found_any && all_standard && disjoint_ok;
  return out;
}

json criterion_a10(Context& ctx, bool& pass) {
  auto rep = verify_order2_theorem(ctx.ext(2));
  pass = rep.predicted_exists && rep.consistent();
  return json::parse(order2_json(rep));
}

json criterion_a11(Context& ctx, bool& pass) {
  (void)ctx;
  json out;
  pass = true;
  // All prime powers r with r^2 <= 2^12.
  std::vector<std::pair<uint32_t, uint32_t>> pps;  // (p, exponent)
  for (uint32_t q = 2; q * q <= 4096; ++q) {
    uint32_t p = 0, n = 0;
    if (prime_power(q, p, n)) pps.emplace_back(p, n);
  }
  std::map<std::pair<uint32_t, uint32_t>, QuadExtension> cache;
  auto get = [&](uint32_t p, uint32_t n) -> const QuadExtension& {
    auto key = std::make_pair(p, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, make_quad_ext(p, n)).first->second;
  };
  uint64_t pairs = 0, mismatches = 0;
  for (auto [p1, a] : pps)
    for (auto [p2, b] : pps) {
      if (p1 != p2) continue;
      ++pairs;
      const auto& small = get(p1, a);
      const auto& large = get(p2, b);
      bool nonempty = !enumerate_ext_embeddings(small, large).empty();
      bool odd_power = (b % a == 0) && ((b / a) % 2 == 1);
      if (nonempty != odd_power) ++mismatches;
    }
  out["pairs_checked"] = pairs;
  out["mismatches"] = mismatches;
  pass = (mismatches == 0) && pairs > 0;
  return out;
}

struct CoreRun {
  std::vector<CriterionResult> results;
  std::string canonical_json;
};

std::vector<Criterion> core_criteria() {
  return {
      {"A1", "construction parameters (q = 2, 3, 4, 8)", criterion_a1},
      {"A2", "line profiles and tangents (q = 2, 3, 4)", criterion_a2},
      {"A3", "form cross-check (q = 2, 3, 4)", criterion_a3},
      {"A4", "no O'Nan configurations", criterion_a4},
      {"A5", "translation groups of order q, transitive", criterion_a5},
      {"A6", "closure and tangent-meet properties", criterion_a6},
      {"A7", "blocks are Baer sublines", criterion_a7},
      {"A8", "no order-2 subunitals in H(F16|F4), H(F9|F3)", criterion_a8},
      {"A9", "order-2 subunitals of H(F64|F8) exist and are standard",
       criterion_a9},
      {"A10", "order-2 matrix model over F4|F2", criterion_a10},
      {"A11", "embedding enumeration law (r^2 <= 4096)", criterion_a11},
  };
}

CoreRun run_core(const SuiteOptions& opts) {
  CoreRun run;
  Context ctx;
  ctx.seed = opts.seed;
  ctx.workers = opts.workers;

  auto selected = [&](const std::string& id) {
    if (opts.only.empty()) return true;
    for (const auto& sel : opts.only)
      if (sel == id) return true;
    return false;
  };

  json report;
  report["seed"] = opts.seed;
  report["criteria"] = json::array();
  for (const auto& c : core_criteria()) {
    if (!selected(c.id)) continue;
    CriterionResult res;
    res.id = c.id;
    res.title = c.title;
    auto t0 = Clock::now();
    json details = c.run(ctx, res.pass);
    res.millis = std::chrono::duration<double, std::milli>(Clock::now() - t0)
                     .count();
    res.details_json = details.dump();
    report["criteria"].push_back(
        {{"id", c.id}, {"pass", res.pass}, {"details", details}});
    run.results.push_back(std::move(res));
  }
  run.canonical_json = report.dump(2);
  return run;
}

}  // namespace

SuiteResult run_verification_suite(const SuiteOptions& opts) {
  SuiteResult out;

  auto want_a12 = [&] {
    if (opts.only.empty()) return true;
    for (const auto& sel : opts.only)
      if (sel == "A12") return true;
    return false;
  }();

  auto first = run_core(opts);
  out.criteria = std::move(first.results);

  if (want_a12) {
    CriterionResult a12;
    a12.id = "A12";
    a12.title = "reproducibility: identical reports for identical seeds";
    auto t0 = Clock::now();
    auto second = run_core(opts);
    a12.pass = (second.canonical_json == first.canonical_json);
    a12.millis =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    json details = {{"bytes", first.canonical_json.size()},
                    {"identical", a12.pass}};
    a12.details_json = details.dump();

    json report = json::parse(first.canonical_json);
    report["criteria"].push_back(
        {{"id", "A12"}, {"pass", a12.pass}, {"details", details}});
    out.criteria.push_back(std::move(a12));
    out.report_json = report.dump(2);
  } else {
    out.report_json = first.canonical_json;
  }

  out.all_pass = true;
  for (const auto& c : out.criteria) out.all_pass &= c.pass;
  return out;
}

std::string format_suite_table(const SuiteResult& res) {
  std::ostringstream os;
  for (const auto& c : res.criteria) {
    os << c.id << (c.id.size() == 2 ? " " : "") << " "
       << (c.pass ? "PASS" : "FAIL") << "  " << c.title << "  ("
       << uint64_t(c.millis) << " ms)\n";
  }
  os << (res.all_pass ? "all criteria passed" : "SOME CRITERIA FAILED")
     << "\n";
  return os.str();
}

}  // namespace unitals
