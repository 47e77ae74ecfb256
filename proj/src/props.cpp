#include "unitals/props.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace unitals {

namespace {

/// Seeded PRNG with unbiased bounded draws; the generator name is part of
/// every sampled report.
struct Sampler {
  std::mt19937_64 eng;
  explicit Sampler(uint64_t seed) : eng(seed) {}
  uint64_t below(uint64_t n) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng();
    } while (x >= limit);
    return x % n;
  }
};

bool block_contains(const std::vector<uint32_t>& block, uint32_t pt) {
  return std::binary_search(block.begin(), block.end(), pt);
}

// Intersection point of two distinct blocks of a linear space, if any.
std::optional<uint32_t> block_meet(const std::vector<uint32_t>& a,
                                   const std::vector<uint32_t>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) ++ia;
    else if (*ib < *ia) ++ib;
    else return *ia;
  }
  return std::nullopt;
}

}  // namespace

LinearSpace LinearSpace::from_unital(const HermitianUnital& u) {
  LinearSpace ls;
  ls.v = u.v();
  ls.blocks = u.blocks;
  ls.point_blocks = u.point_blocks;
  ls.pair_block_ = u.pair_block_;
  return ls;
}

LinearSpace LinearSpace::from_blocks(uint32_t v,
                                     std::vector<std::vector<uint32_t>> blocks) {
  LinearSpace ls;
  ls.v = v;
  ls.blocks = std::move(blocks);
  ls.point_blocks.assign(v, {});
  ls.pair_block_.assign(uint64_t(v) * v, UINT32_MAX);
  for (uint32_t b = 0; b < ls.blocks.size(); ++b) {
    auto& blk = ls.blocks[b];
    std::sort(blk.begin(), blk.end());
    for (size_t i = 0; i < blk.size(); ++i) {
      if (blk[i] >= v) throw std::invalid_argument("block point out of range");
      ls.point_blocks[blk[i]].push_back(b);
      for (size_t j = i + 1; j < blk.size(); ++j) {
        uint64_t k1 = uint64_t(blk[i]) * v + blk[j];
        uint64_t k2 = uint64_t(blk[j]) * v + blk[i];
        if (ls.pair_block_[k1] != UINT32_MAX)
          throw std::invalid_argument("point pair covered twice");
        ls.pair_block_[k1] = b;
        ls.pair_block_[k2] = b;
      }
    }
  }
  for (uint32_t i = 0; i < v; ++i)
    for (uint32_t j = i + 1; j < v; ++j)
      if (ls.pair_block(i, j) == UINT32_MAX)
        throw std::invalid_argument("point pair not covered");
  return ls;
}

namespace {

// Tests one tuple of the O'Nan scheme; emits the configuration if the two
// cross blocks meet outside B1 union B2.
std::optional<OnanConfiguration> onan_probe(const LinearSpace& ls, uint32_t p,
                                            uint32_t b1, uint32_t b2,
                                            uint32_t a, uint32_t b, uint32_t c,
                                            uint32_t d) {
  uint32_t b3 = ls.pair_block(a, c);
  uint32_t b4 = ls.pair_block(b, d);
  if (b3 == b4) return std::nullopt;
  auto e = block_meet(ls.blocks[b3], ls.blocks[b4]);
  if (!e) return std::nullopt;
  if (block_contains(ls.blocks[b1], *e) || block_contains(ls.blocks[b2], *e))
    return std::nullopt;
  OnanConfiguration cfg;
  cfg.blocks = {b1, b2, b3, b4};
  std::sort(cfg.blocks.begin(), cfg.blocks.end());
  cfg.points = {p, a, b, c, d, *e};
  std::sort(cfg.points.begin(), cfg.points.end());
  return cfg;
}

}  // namespace

OnanReport find_onan_configs(const LinearSpace& ls, ScanOptions opts) {
  OnanReport rep;
  rep.options = opts;
  std::set<std::array<uint32_t, 4>> seen;

  auto record = [&](const OnanConfiguration& cfg) {
    if (seen.insert(cfg.blocks).second) rep.found.push_back(cfg);
  };

  if (opts.mode == ScanMode::exhaustive) {
    for (uint32_t p = 0; p < ls.v; ++p) {
      const auto& through = ls.point_blocks[p];
      for (size_t i1 = 0; i1 < through.size(); ++i1) {
        for (size_t i2 = i1 + 1; i2 < through.size(); ++i2) {
          uint32_t b1 = through[i1], b2 = through[i2];
          std::vector<uint32_t> s1, s2;
          for (uint32_t t : ls.blocks[b1])
            if (t != p) s1.push_back(t);
          for (uint32_t t : ls.blocks[b2])
            if (t != p) s2.push_back(t);
          for (uint32_t a : s1)
            for (uint32_t b : s1) {
              if (a == b) continue;
              for (uint32_t c : s2)
                for (uint32_t d : s2) {
                  if (c == d) continue;
                  ++rep.configurations_checked;
                  if (auto cfg = onan_probe(ls, p, b1, b2, a, b, c, d))
                    record(*cfg);
                }
            }
        }
      }
    }
  } else {
    Sampler rng(opts.seed);
    while (rep.configurations_checked < opts.sample_count) {
      uint32_t p = uint32_t(rng.below(ls.v));
      const auto& through = ls.point_blocks[p];
      if (through.size() < 2) continue;
      uint32_t i1 = uint32_t(rng.below(through.size()));
      uint32_t i2 = uint32_t(rng.below(through.size()));
      if (i1 == i2) continue;
      uint32_t b1 = through[i1], b2 = through[i2];
      if (ls.blocks[b1].size() < 3 || ls.blocks[b2].size() < 3) continue;
      auto draw_two = [&](const std::vector<uint32_t>& blk, uint32_t& x,
                          uint32_t& y) {
        std::vector<uint32_t> rest;
        for (uint32_t t : blk)
          if (t != p) rest.push_back(t);
        uint32_t j1 = uint32_t(rng.below(rest.size()));
        uint32_t j2;
        do {
          j2 = uint32_t(rng.below(rest.size()));
        } while (j2 == j1);
        x = rest[j1];
        y = rest[j2];
      };
      uint32_t a, b, c, d;
      draw_two(ls.blocks[b1], a, b);
      draw_two(ls.blocks[b2], c, d);
      ++rep.configurations_checked;
      if (auto cfg = onan_probe(ls, p, b1, b2, a, b, c, d)) record(*cfg);
    }
  }
  return rep;
}

TranslationGroup translations_at(const HermitianUnital& u, uint32_t p) {
  TranslationGroup g;
  g.center = p;
  const auto& ext = u.ext;
  const FieldRef& C = ext.C;
  const ProjPoint& center = u.points[p];
  const ProjLine& axis = u.tangent_at(p);
  std::array<Fe, 3> cvec = {center.x, center.y, center.z};
  std::array<Fe, 3> lvec = {axis.a, axis.b, axis.c};

  const uint32_t v = u.v();
  for (uint32_t code = 0; code < C->order; ++code) {
    Fe lam = C->element(code);
    // x -> x + lambda * l(x) * center, i.e. I + lambda * center * l^T.
    std::array<std::array<Fe, 3>, 3> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        m[i][j] = lam * cvec[i] * lvec[j];
        if (i == j) m[i][j] = m[i][j] + C->one();
      }
    ProjectiveMap pm = normalize_map(m);
    std::vector<uint32_t> perm(v);
    bool keeps = true;
    for (uint32_t i = 0; i < v && keeps; ++i) {
      auto img = u.point_index(apply(pm, u.points[i]));
      if (!img) keeps = false;
      else perm[i] = *img;
    }
    if (!keeps) continue;

    Translation t;
    t.center = p;
    t.lambda = lam;
    t.matrix = pm;
    t.block_perm.resize(u.b());
    for (uint32_t b = 0; b < u.b(); ++b) {
      const auto& blk = u.blocks[b];
      t.block_perm[b] = u.pair_block(perm[blk[0]], perm[blk[1]]);
    }
    t.point_perm = std::move(perm);
    g.elements.push_back(std::move(t));
  }

  // The kept lambdas form a group: closed under the addition that composes
  // the elations.
  std::set<uint32_t> lams;
  for (const auto& t : g.elements) lams.insert(t.lambda.code);
  for (const auto& t1 : g.elements)
    for (const auto& t2 : g.elements)
      if (!lams.count((t1.lambda + t2.lambda).code))
        throw std::logic_error("translation set not closed under composition");
  return g;
}

TransitivityReport check_translation_transitivity(const HermitianUnital& u) {
  TransitivityReport rep;
  rep.group_order.resize(u.v());
  for (uint32_t z = 0; z < u.v(); ++z) {
    auto g = translations_at(u, z);
    rep.group_order[z] = g.order();
    for (uint32_t b : u.point_blocks[z]) {
      ++rep.configurations_checked;
      const auto& blk = u.blocks[b];
      uint32_t x0 = blk[0] == z ? blk[1] : blk[0];
      std::set<uint32_t> orbit;
      for (const auto& t : g.elements) orbit.insert(t.point_perm[x0]);
      for (uint32_t y : blk) {
        if (y == z) continue;
        if (!orbit.count(y)) rep.failures.push_back({x0, y, z});
      }
    }
  }
  return rep;
}

namespace {

// Blocks not through p meeting X, Y and Z; used by both closure and
// tangent-meet scans.
std::vector<uint32_t> blocks_meeting_three(const LinearSpace& ls, uint32_t p,
                                           uint32_t X, uint32_t Y, uint32_t Z) {
  std::vector<uint32_t> out;
  for (uint32_t b = 0; b < ls.blocks.size(); ++b) {
    if (b == X || b == Y || b == Z) continue;
    const auto& blk = ls.blocks[b];
    if (block_contains(blk, p)) continue;
    if (block_meet(blk, ls.blocks[X]) && block_meet(blk, ls.blocks[Y]) &&
        block_meet(blk, ls.blocks[Z]))
      out.push_back(b);
  }
  return out;
}

// The blocks through z meeting X, Y, Z in three distinct points.
std::vector<uint32_t> closure_candidates(const LinearSpace& ls, uint32_t z,
                                         uint32_t X, uint32_t Y, uint32_t Z) {
  std::vector<uint32_t> cands;
  for (uint32_t d : ls.point_blocks[z]) {
    auto mx = block_meet(ls.blocks[d], ls.blocks[X]);
    auto my = block_meet(ls.blocks[d], ls.blocks[Y]);
    auto mz = block_meet(ls.blocks[d], ls.blocks[Z]);
    if (mx && my && mz && *mx != *my && *my != *mz && *mx != *mz)
      cands.push_back(d);
  }
  return cands;
}

struct ClosureConfig {
  uint32_t p, X, Y, Z, B, z;
};

template <typename Fn>
void for_each_closure_config(const LinearSpace& ls, ScanOptions opts, Fn fn) {
  if (opts.mode == ScanMode::exhaustive) {
    for (uint32_t p = 0; p < ls.v; ++p) {
      const auto& through = ls.point_blocks[p];
      size_t r = through.size();
      for (size_t i = 0; i < r; ++i)
        for (size_t j = i + 1; j < r; ++j)
          for (size_t k = j + 1; k < r; ++k) {
            uint32_t X = through[i], Y = through[j], Z = through[k];
            auto bs = blocks_meeting_three(ls, p, X, Y, Z);
            for (uint32_t B : bs) {
              for (uint32_t blkid : {X, Y, Z})
                for (uint32_t z : ls.blocks[blkid]) {
                  if (z == p) continue;
                  fn(ClosureConfig{p, X, Y, Z, B, z});
                }
            }
          }
    }
  } else {
    Sampler rng(opts.seed);
    uint64_t produced = 0;
    while (produced < opts.sample_count) {
      uint32_t p = uint32_t(rng.below(ls.v));
      const auto& through = ls.point_blocks[p];
      if (through.size() < 3) continue;
      uint32_t i = uint32_t(rng.below(through.size()));
      uint32_t j = uint32_t(rng.below(through.size()));
      uint32_t k = uint32_t(rng.below(through.size()));
      if (i == j || j == k || i == k) continue;
      uint32_t X = through[i], Y = through[j], Z = through[k];
      auto bs = blocks_meeting_three(ls, p, X, Y, Z);
      if (bs.empty()) continue;
      uint32_t B = bs[rng.below(bs.size())];
      std::vector<uint32_t> zs;
      for (uint32_t blkid : {X, Y, Z})
        for (uint32_t z : ls.blocks[blkid])
          if (z != p) zs.push_back(z);
      uint32_t z = zs[rng.below(zs.size())];
      fn(ClosureConfig{p, X, Y, Z, B, z});
      ++produced;
    }
  }
}

void check_closure_config(const LinearSpace& ls, const ClosureConfig& c,
                          const TranslationGroup* tp, const HermitianUnital* u,
                          ClosureReport& rep) {
  ++rep.configurations_checked;
  auto cands = closure_candidates(ls, c.z, c.X, c.Y, c.Z);
  if (cands.size() != 1) {
    rep.failures.push_back({c.p, c.z, c.B, cands,
                            cands.empty() ? "no block through z meets the triple"
                                          : "multiple blocks meet the triple"});
    return;
  }
  uint32_t bprime = cands[0];
  if (tp) {
    bool image = false;
    for (const auto& t : tp->elements) image |= (t.block_perm[c.B] == bprime);
    if (!image) {
      rep.failures.push_back(
          {c.p, c.z, c.B, cands, "B' is not a translation image of B"});
      return;
    }
  }
  if (u) {
    for (uint32_t e : ls.point_blocks[c.p]) {
      bool meets_b = bool(block_meet(ls.blocks[e], ls.blocks[c.B]));
      bool meets_bp = bool(block_meet(ls.blocks[e], ls.blocks[bprime]));
      if (meets_b && !meets_bp) {
        rep.failures.push_back({c.p, c.z, c.B, cands,
                                "a block through p meets B but not B'"});
        return;
      }
    }
  }
}

}  // namespace

ClosureReport check_translation_closure(const HermitianUnital& u,
                                        ScanOptions opts) {
  ClosureReport rep;
  rep.options = opts;
  LinearSpace ls = LinearSpace::from_unital(u);
  // Translation groups are center-cached across configurations.
  std::vector<std::optional<TranslationGroup>> cache(u.v());
  for_each_closure_config(ls, opts, [&](const ClosureConfig& c) {
    if (!cache[c.p]) cache[c.p] = translations_at(u, c.p);
    check_closure_config(ls, c, &*cache[c.p], &u, rep);
  });
  return rep;
}

ClosureReport check_closure_combinatorial(const LinearSpace& ls,
                                          ScanOptions opts) {
  ClosureReport rep;
  rep.options = opts;
  for_each_closure_config(ls, opts, [&](const ClosureConfig& c) {
    check_closure_config(ls, c, nullptr, nullptr, rep);
  });
  return rep;
}

TangentMeetReport check_tangent_meet(const HermitianUnital& u,
                                     ScanOptions opts) {
  TangentMeetReport rep;
  rep.options = opts;
  LinearSpace ls = LinearSpace::from_unital(u);

  auto check_pair = [&](uint32_t p, uint32_t b1, uint32_t b2) {
    ++rep.configurations_checked;
    ProjLine l1 = u.block_line(b1);
    ProjLine l2 = u.block_line(b2);
    ProjPoint m = meet(l1, l2);
    if (!incident(m, u.tangent_at(p))) rep.failures.push_back({p, b1, b2});
  };

  if (opts.mode == ScanMode::exhaustive) {
    for (uint32_t p = 0; p < u.v(); ++p) {
      const auto& through = ls.point_blocks[p];
      size_t r = through.size();
      for (size_t i = 0; i < r; ++i)
        for (size_t j = i + 1; j < r; ++j)
          for (size_t k = j + 1; k < r; ++k) {
            auto bs = blocks_meeting_three(ls, p, through[i], through[j],
                                           through[k]);
            for (size_t x = 0; x < bs.size(); ++x)
              for (size_t y = x + 1; y < bs.size(); ++y) {
                if (block_meet(ls.blocks[bs[x]], ls.blocks[bs[y]])) continue;
                check_pair(p, bs[x], bs[y]);
              }
          }
    }
  } else {
    Sampler rng(opts.seed);
    while (rep.configurations_checked < opts.sample_count) {
      uint32_t p = uint32_t(rng.below(u.v()));
      const auto& through = ls.point_blocks[p];
      uint32_t i = uint32_t(rng.below(through.size()));
      uint32_t j = uint32_t(rng.below(through.size()));
      uint32_t k = uint32_t(rng.below(through.size()));
      if (i == j || j == k || i == k) continue;
      auto bs = blocks_meeting_three(ls, p, through[i], through[j], through[k]);
      if (bs.size() < 2) continue;
      uint32_t x = uint32_t(rng.below(bs.size()));
      uint32_t y = uint32_t(rng.below(bs.size()));
      if (x == y) continue;
      if (block_meet(ls.blocks[bs[x]], ls.blocks[bs[y]])) continue;
      check_pair(p, bs[x], bs[y]);
    }
  }
  return rep;
}

WilbrinkReport wilbrink_report(const HermitianUnital& u, ScanOptions opts) {
  WilbrinkReport rep;
  auto onan = find_onan_configs(LinearSpace::from_unital(u), opts);
  rep.condition_I = onan.empty();
  if (rep.condition_I) rep.condition_II = check_translation_closure(u, opts).pass();
  return rep;
}

WilbrinkReport wilbrink_report(const LinearSpace& ls, ScanOptions opts) {
  WilbrinkReport rep;
  auto onan = find_onan_configs(ls, opts);
  rep.condition_I = onan.empty();
  if (rep.condition_I)
    rep.condition_II = check_closure_combinatorial(ls, opts).pass();
  return rep;
}

namespace {

nlohmann::json options_json(const ScanOptions& o) {
  nlohmann::json j;
  j["mode"] = o.mode == ScanMode::exhaustive ? "exhaustive" : "sample";
  if (o.mode == ScanMode::sample) {
    j["seed"] = o.seed;
    j["count"] = o.sample_count;
    j["rng"] = "mt19937_64";
  }
  return j;
}

}  // namespace

std::string report_json(const OnanReport& r) {
  nlohmann::json j = options_json(r.options);
  j["property"] = "onan";
  j["configurations_checked"] = r.configurations_checked;
  j["failures"] = nlohmann::json::array();
  for (const auto& c : r.found)
    j["failures"].push_back({{"blocks", c.blocks}, {"points", c.points}});
  return j.dump();
}

std::string report_json(const TransitivityReport& r) {
  nlohmann::json j;
  j["property"] = "translation-transitivity";
  j["mode"] = "exhaustive";
  j["configurations_checked"] = r.configurations_checked;
  j["group_order"] = r.group_order;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : r.failures)
    j["failures"].push_back({{"x", f.x}, {"y", f.y}, {"z", f.z}});
  return j.dump();
}

std::string report_json(const ClosureReport& r, const std::string& property) {
  nlohmann::json j = options_json(r.options);
  j["property"] = property;
  j["configurations_checked"] = r.configurations_checked;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : r.failures)
    j["failures"].push_back({{"p", f.p},
                             {"z", f.z},
                             {"block", f.block_b},
                             {"candidates", f.candidates},
                             {"reason", f.reason}});
  return j.dump();
}

std::string report_json(const TangentMeetReport& r) {
  nlohmann::json j = options_json(r.options);
  j["property"] = "tangent-meet";
  j["configurations_checked"] = r.configurations_checked;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : r.failures)
    j["failures"].push_back(
        {{"p", f.p}, {"block_b", f.block_b}, {"block_b2", f.block_b2}});
  return j.dump();
}

std::string report_json(const WilbrinkReport& r) {
  nlohmann::json j;
  j["property"] = "wilbrink";
  j["condition_I"] = r.condition_I;
  if (r.condition_II)
    j["condition_II"] = *r.condition_II;
  else
    j["condition_II"] = nullptr;
  return j.dump();
}

}  // namespace unitals
