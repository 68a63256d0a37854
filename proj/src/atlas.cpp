#include "carnot/atlas.hpp"

#include "carnot/group_file.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace carnot {

ChartAtlas::ChartAtlas(std::shared_ptr<const Group> g, std::vector<Chart> charts,
                       std::vector<std::pair<int, int>> overlaps, std::vector<Box> overlap_boxes)
    : g_(std::move(g)), charts_(std::move(charts)), overlaps_(std::move(overlaps)),
      boxes_(std::move(overlap_boxes)) {
  for (const auto& c : charts_)
    if (!c.h.has_inverse()) fail("InverseUnavailable", "chart " + c.name + " has no inverse");
  for (size_t k = 0; k < overlaps_.size(); ++k)
    if (overlap(overlaps_[k].first, overlaps_[k].second).empty())
      fail("EmptyOverlap", "charts " + charts_[overlaps_[k].first].name + " and " +
                               charts_[overlaps_[k].second].name + " do not overlap");
}

int ChartAtlas::index(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (charts_[i].name == name) return i;
  fail("UnknownChart", name);
}

SmoothMap ChartAtlas::transition(int i, int j) const {
  return charts_[j].h.compose(charts_[i].h.inverse())
      .renamed("Phi_" + charts_[i].name + "," + charts_[j].name);
}

Box ChartAtlas::overlap(int i, int j) const {
  for (size_t k = 0; k < overlaps_.size(); ++k) {
    const auto [a, b] = overlaps_[k];
    if (((a == i && b == j) || (a == j && b == i)) && boxes_[k].dim() > 0) return boxes_[k];
  }
  return charts_[i].domain.intersect(charts_[j].domain);
}

std::vector<Vec> ChartAtlas::overlap_samples(int i, int j, int k, int n, Rng& rng) const {
  Box b = overlap(i, j);
  if (k >= 0) b = b.intersect(charts_[k].domain);
  std::vector<Vec> pts;
  if (b.empty()) return pts;
  for (int s = 0; s < n; ++s) pts.push_back(b.sample(rng));
  return pts;
}

namespace {

std::vector<double> numbers(std::istringstream& in, int line) {
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (...) {
      fail("SyntaxError", "line " + std::to_string(line) + ": bad number '" + tok + "'");
    }
  }
  return v;
}

Mat parse_rows(const std::string& s, int d) {
  Mat A(d, d);
  std::istringstream in(s);
  std::string row;
  int r = 0;
  while (std::getline(in, row, '|')) {
    std::istringstream rs(row);
    const auto v = numbers(rs, 0);
    if (r >= d || static_cast<int>(v.size()) != d) fail("SyntaxError", "matrix must be " +
                                                         std::to_string(d) + "x" + std::to_string(d));
    for (int c = 0; c < d; ++c) A(r, c) = v[c];
    ++r;
  }
  if (r != d) fail("SyntaxError", "matrix must have " + std::to_string(d) + " rows");
  return A;
}

}  // namespace

SmoothMap parse_map_spec(const StratifiedAlgebra& alg, const std::string& spec) {
  const int d = alg.dim();
  std::istringstream in(spec);
  std::string kind;
  in >> kind;
  std::string rest;
  std::getline(in, rest);
  std::istringstream rin(rest);
  if (kind == "identity") return SmoothMap::identity(d);
  if (kind == "automorphism") {
    const Mat A = parse_rows(rest, d);
    StrataAutomorphism::from_matrix(alg, A);  // validates
    return SmoothMap::linear(A, "automorphism");
  }
  if (kind == "linear") return SmoothMap::linear(parse_rows(rest, d), "linear");
  if (kind == "translation" || kind == "right-translation") {
    const auto v = numbers(rin, 0);
    if (static_cast<int>(v.size()) != d) fail("SyntaxError", kind + " needs " + std::to_string(d) + " numbers");
    const Vec a = Eigen::Map<const Vec>(v.data(), d);
    return kind == "translation" ? SmoothMap::translation(alg, a) : SmoothMap::right_translation(alg, a);
  }
  if (kind == "dilation") {
    const auto v = numbers(rin, 0);
    if (v.size() != 1) fail("SyntaxError", "dilation needs one factor");
    return SmoothMap::dilation(alg, v[0]);
  }
  if (kind == "polynomial") {
    return SmoothMap::polynomial(parse_polyvec(rest, d), "polynomial").with_newton_inverse();
  }
  fail("SyntaxError", "unknown map kind '" + kind + "'");
}

ChartAtlas parse_atlas_text(const std::string& text, const std::string& base_dir) {
  std::shared_ptr<const Group> g;
  std::vector<Chart> charts;
  std::vector<bool> have_domain;
  std::vector<std::pair<std::string, std::string>> pending;
  std::vector<Box> boxes;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto syntax = [&](const std::string& m) {
    fail("SyntaxError", "line " + std::to_string(lineno) + ": " + m);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.resize(p);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "group") {
      std::string file;
      ls >> file;
      std::filesystem::path p(file);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      g = std::make_shared<const Group>(load_group(p.string()));
    } else if (key == "chart") {
      if (!g) syntax("chart before group");
      std::string name;
      if (!(ls >> name)) syntax("chart needs a name");
      charts.push_back({name, Box::cube(g->dim(), 1e300), SmoothMap::identity(g->dim())});
      have_domain.push_back(false);
    } else if (key == "domain") {
      if (charts.empty()) syntax("domain outside a chart");
      const auto v = numbers(ls, lineno);
      const int d = g->dim();
      if (static_cast<int>(v.size()) != 2 * d) syntax("domain needs " + std::to_string(2 * d) + " numbers");
      Box b{Vec(d), Vec(d)};
      for (int i = 0; i < d; ++i) {
        b.lo(i) = v[2 * i];
        b.hi(i) = v[2 * i + 1];
      }
      charts.back().domain = b;
      have_domain.back() = true;
    } else if (key == "map") {
      if (charts.empty()) syntax("map outside a chart");
      std::string spec;
      std::getline(ls, spec);
      try {
        SmoothMap m = parse_map_spec(g->alg(), spec);
        Chart& c = charts.back();
        c.h = m.compose(c.h).renamed(c.name);
      } catch (const Error& e) {
        if (e.kind() == "SyntaxError") syntax(e.what());
        throw;
      }
    } else if (key == "overlap") {
      std::string a, b, word;
      if (!(ls >> a >> b)) syntax("overlap needs two chart names");
      pending.emplace_back(a, b);
      if (ls >> word) {
        if (word != "box") syntax("expected 'box'");
        const auto v = numbers(ls, lineno);
        const int d = g->dim();
        if (static_cast<int>(v.size()) != 2 * d) syntax("overlap box needs " + std::to_string(2 * d) + " numbers");
        Box bx{Vec(d), Vec(d)};
        for (int i = 0; i < d; ++i) {
          bx.lo(i) = v[2 * i];
          bx.hi(i) = v[2 * i + 1];
        }
        boxes.push_back(bx);
      } else {
        boxes.push_back(Box{});
      }
    } else {
      syntax("unknown keyword '" + key + "'");
    }
  }
  if (!g) fail("SyntaxError", "atlas has no group line");
  for (size_t i = 0; i < charts.size(); ++i)
    if (!have_domain[i]) fail("SyntaxError", "chart " + charts[i].name + " has no domain");
  std::vector<std::pair<int, int>> ov;
  auto find = [&](const std::string& n) {
    for (size_t i = 0; i < charts.size(); ++i)
      if (charts[i].name == n) return static_cast<int>(i);
    fail("UnknownChart", n);
  };
  for (const auto& [a, b] : pending) ov.emplace_back(find(a), find(b));
  return ChartAtlas(g, std::move(charts), std::move(ov), std::move(boxes));
}

ChartAtlas parse_atlas_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("IoError", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_atlas_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

double first_block_distance(const Mat& P, int n1) {
  const Mat D = P.topLeftCorner(n1, n1) - Mat::Identity(n1, n1);
  return Eigen::JacobiSVD<Mat>(D).singularValues()(0);
}

}  // namespace

AtlasReport verify_atlas(const ChartAtlas& atlas, int samples, Rng& rng, double tol) {
  AtlasReport rep;
  rep.tol = tol;
  const Group& g = atlas.group();
  const auto& ch = atlas.charts();
  const int n1 = g.n1();
  std::ostringstream msg;

  for (const auto& [i, j] : atlas.overlaps()) {
    const auto pts = atlas.overlap_samples(i, j, -1, samples, rng);
    for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
      TransitionAudit t;
      t.i = a;
      t.j = b;
      const SmoothMap phi = atlas.transition(a, b);
      std::vector<Vec> src;
      for (const auto& x : pts) src.push_back(ch[a].h(x));
      // Transitions are certified with the looser sampling tolerance.
      t.diffeo = check_G_diffeomorphism(g, phi, src, std::max(tol, 1e-7));
      if (!t.diffeo.pass())
        rep.failures.push_back("transition " + ch[a].name + "->" + ch[b].name + " is not a G-diffeomorphism");
      rep.transitions.push_back(t);
    }
    const SmoothMap pij = atlas.transition(i, j), pji = atlas.transition(j, i);
    for (const auto& x : pts) {
      try {
        const Mat P = admissibility_matrix(g, pji, ch[j].h(x)) * admissibility_matrix(g, pij, ch[i].h(x));
        rep.pairwise_residual = std::max(rep.pairwise_residual, first_block_distance(P, n1));
        ++rep.pairwise_samples;
      } catch (const Error& e) {
        rep.failures.push_back(std::string("pairwise cocycle: ") + e.what());
        break;
      }
    }
  }
  // Triple overlaps among declared pairs.
  for (int i = 0; i < atlas.size(); ++i)
    for (int j = i + 1; j < atlas.size(); ++j)
      for (int k = j + 1; k < atlas.size(); ++k) {
        const auto pts = atlas.overlap_samples(i, j, k, samples, rng);
        if (pts.empty()) continue;
        ++rep.triples;
        const SmoothMap pij = atlas.transition(i, j), pjk = atlas.transition(j, k),
                        pki = atlas.transition(k, i);
        for (const auto& x : pts) {
          try {
            const Mat P = admissibility_matrix(g, pki, ch[k].h(x)) *
                          admissibility_matrix(g, pjk, ch[j].h(x)) *
                          admissibility_matrix(g, pij, ch[i].h(x));
            rep.triple_residual = std::max(rep.triple_residual, first_block_distance(P, n1));
            ++rep.triple_samples;
          } catch (const Error& e) {
            rep.failures.push_back(std::string("triple cocycle: ") + e.what());
            break;
          }
        }
      }
  if (rep.pairwise_residual > tol) {
    msg << "pairwise cocycle residual " << rep.pairwise_residual << " exceeds " << tol;
    rep.failures.push_back(msg.str());
  }
  if (rep.triple_residual > tol) {
    std::ostringstream m2;
    m2 << "triple cocycle residual " << rep.triple_residual << " exceeds " << tol;
    rep.failures.push_back(m2.str());
  }
  return rep;
}

}  // namespace carnot
