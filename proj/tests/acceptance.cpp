// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance <path to k3conics CLI> <scratch directory>

#include "k3conics/census.hpp"
#include "k3conics/golay.hpp"
#include "k3conics/lattice/short_vectors.hpp"
#include "k3conics/leech.hpp"
#include "k3conics/ns_builder.hpp"
#include "k3conics/report.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

using namespace k3conics;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0 && secs > budget_seconds) {
    o.pass = false;
    o.detail += " (over time budget of " + std::to_string(budget_seconds) + " s)";
  }
  if (!o.pass) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " [" << o.detail << "; " << secs
       << " s]";
  std::cout << line.str() << std::endl;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Shared state built lazily by the criteria that need it.
struct State {
  golay::GolayCode base = golay::GolayCode::build();
  std::optional<golay::NormalizedCode> framed;
  census::Generators gens;
  std::optional<std::vector<census::ConicRecord>> conics;
  std::optional<census::IntersectionGraph> graph;
  std::optional<leech::LeechBasis> leech_basis;
  std::optional<lattice::Lattice> s;
  std::optional<ns::PolarizedLattice> n;

  const golay::GolayCode& code() {
    if (!framed) framed = golay::normalize_frame(base);
    return framed->code;
  }
  const std::vector<census::ConicRecord>& conic_list() {
    if (!conics) conics = census::find_conics(code(), gens, default_thread_count());
    return *conics;
  }
  const census::IntersectionGraph& conic_graph() {
    if (!graph) graph = census::intersection_graph(conic_list(), default_thread_count());
    return *graph;
  }
  const leech::LeechBasis& basis() {
    if (!leech_basis) leech_basis = leech::leech_basis(leech::enumerate_shape31(code()));
    return *leech_basis;
  }
  const lattice::Lattice& s_lattice() {
    if (!s) s = ns::build_S(gens, basis().lattice);
    return *s;
  }
  const ns::PolarizedLattice& n_lattice() {
    if (!n) n = ns::build_N(s_lattice(), gens, conic_list());
    return *n;
  }
};

report::Json strip_runtime(const std::filesystem::path& file) {
  std::ifstream in(file);
  auto j = report::Json::parse(in);
  j.erase("runtime");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <k3conics CLI> <scratch dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path work = argv[2];
  std::filesystem::create_directories(work);
  State st;

  run(1, "Golay weight distribution and Steiner S(5,8,24)", 5, [&] {
    const auto wd = st.base.weight_distribution();
    const bool weights = st.base.words().size() == 4096 && wd == golay::WeightDistribution{1, 759, 2576, 759, 1, 0};
    const bool steiner = golay::steiner_check(st.base);
    return Outcome{weights && steiner, "weights " + join({wd.w0, wd.w8, wd.w12, wd.w16, wd.w24}) +
                                           ", Steiner " + (steiner ? "holds" : "fails")};
  });

  run(2, "exactly 4 octads meet {1..5} in {1,2,4,5}", 0, [&] {
    const std::size_t n = golay::codewords_meeting(st.code(), golay::Frame::kFixedMask, golay::Frame::kFixedInOctad, 8).size();
    return Outcome{n == 4, std::to_string(n) + " octads"};
  });

  run(3, "Leech minimal vectors: shapes, duplicates, negation, norms", 10, [&] {
    const auto all = leech::all_minimal_vectors(st.code());
    std::size_t c[3] = {0, 0, 0}, bad_norm = 0;
    std::set<leech::Coords> seen;
    for (const auto& v : all) {
      ++c[static_cast<int>(v.shape)];
      bad_norm += leech::inner(v, v).raw != 32;
      seen.insert(v.coords);
    }
    std::size_t unmatched = 0;
    for (const auto& v : all) {
      leech::Coords neg;
      for (std::size_t i = 0; i < 24; ++i) neg[i] = static_cast<std::int8_t>(-v.coords[i]);
      unmatched += seen.count(neg) == 0;
    }
    const bool ok = c[0] == 98304 && c[1] == 97152 && c[2] == 1104 && all.size() == 196560 &&
                    seen.size() == all.size() && unmatched == 0 && bad_norm == 0;
    return Outcome{ok, "shapes " + join({c[0], c[1], c[2]}) + ", total " + std::to_string(all.size()) + ", distinct " +
                           std::to_string(seen.size()) + ", unmatched negatives " + std::to_string(unmatched)};
  });

  run(4, "generator Gram matrix and det 160", 0, [&] {
    const RatMatrix g = st.gens.gram();
    const Rational det = oracle::cofactor_determinant(g);
    return Outcome{g == census::Generators::expected_gram() && det == 160, "cofactor det " + det.get_str()};
  });

  run(5, "800 conics, split 96/96/320/288, codeword recount per row", 30, [&] {
    const auto& cs = st.conic_list();
    const auto counts = census::count_patterns(cs);
    const auto recount = census::verify_codeword_recount(st.code(), cs);
    std::string rows;
    bool factors = true;
    const std::array<std::size_t, 4> expected_factor{16, 16, 10, 3};
    for (std::size_t i = 0; i < recount.rows.size(); ++i) {
      rows += " " + recount.rows[i].label + "=" + std::to_string(recount.rows[i].combinatorial_total);
      for (const auto& [pair, n] : recount.rows[i].codeword_counts) factors = factors && n == expected_factor[i];
    }
    const bool ok = cs.size() == 800 && counts.by_pattern == std::array<std::size_t, 4>{96, 96, 320, 288} &&
                    recount.pass && factors;
    return Outcome{ok, std::to_string(cs.size()) + " conics, split " +
                           join({counts.by_pattern[0], counts.by_pattern[1], counts.by_pattern[2], counts.by_pattern[3]}) +
                           ", recount" + rows};
  });

  run(6, "same totals and split for each of the 4 frame octads", 0, [&] {
    std::string detail;
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      const auto cs = census::find_conics(golay::normalize_frame(st.base, i).code, st.gens, default_thread_count());
      const auto c = census::count_patterns(cs);
      ok = ok && cs.size() == 800 && c.by_pattern == std::array<std::size_t, 4>{96, 96, 320, 288};
      detail += (i ? "; " : "") + std::to_string(i) + ": " +
                join({c.by_pattern[0], c.by_pattern[1], c.by_pattern[2], c.by_pattern[3]});
    }
    return Outcome{ok, detail};
  });

  run(7, "16 pairwise disjoint conics", 60, [&] {
    const auto clique = census::find_disjoint_clique(st.conic_graph(), 16);
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < clique.vertices.size(); ++a)
      for (std::size_t b = a + 1; b < clique.vertices.size(); ++b)
        pairs += leech::inner(st.conic_list()[clique.vertices[a]].l, st.conic_list()[clique.vertices[b]].l).raw == 16;
    return Outcome{clique.vertices.size() == 16 && pairs == 120,
                   "conics " + join(clique.vertices) + ", disjoint pairs " + std::to_string(pairs)};
  });

  run(8, "parity of hbar on S and h on N; c.c = -2, c.h = 2 for all classes", 0, [&] {
    const bool hbar = ns::check_hbar_parity(st.s_lattice(), st.gens.hbar);
    const bool h = ns::check_h_parity(st.n_lattice());
    const auto classes = ns::check_conic_classes(st.n_lattice());
    return Outcome{hbar && h && classes.pass() && classes.count == 800,
                   std::string("hbar even ") + (hbar ? "yes" : "no") + ", h even " + (h ? "yes" : "no") + ", classes ok " +
                       std::to_string(classes.self_norm_ok) + "/" + std::to_string(classes.degree_ok)};
  });

  run(9, "discriminant forms of V~, N and T with verified witnesses", 0, [&] {
    const auto r = ns::verify_discriminants(ns::build_V(st.gens), st.n_lattice(), st.basis().lattice);
    std::string detail = "|discr V~| " + std::to_string(r.v_tilde_order) + ", |discr N| " + std::to_string(r.n_order);
    for (const auto& c : r.checks) detail += std::string(", ") + (c.pass() ? "ok" : "FAILED") + " " + c.name;
    return Outcome{r.pass(), detail};
  });

  run(10, "no exceptional divisors or 2-isotropic vectors; planted control found", 0, [&] {
    const auto bad = ns::bad_vector_scan(st.n_lattice());
    const auto control = ns::bad_vector_scan(RatMatrix{{4, 0}, {0, -2}}, IntVector{1, 0});
    return Outcome{bad.empty() && !control.exceptional.empty(),
                   "exceptional " + std::to_string(bad.exceptional.size()) + ", isotropic " +
                       std::to_string(bad.isotropic.size()) + ", control " + std::to_string(control.exceptional.size())};
  });

  run(11, "Fincke-Pohst on the Leech basis Gram: 196560 at norm 4, none at norm 2", 1800, [&] {
    const RatMatrix g = st.basis().lattice.gram();
    const std::size_t four = lattice::count_short_vectors(g, 4);
    const std::size_t two = lattice::count_short_vectors(g, 2);
    return Outcome{four == 196560 && two == 0, "norm 4: " + std::to_string(four) + ", norm 2: " + std::to_string(two)};
  });

  run(12, "verify-all JSON identical across runs and thread counts", 0, [&] {
    const auto a = work / "run_threads1.json", b = work / "run_threads4.json", c = work / "run_threads4_again.json";
    const std::string quiet = " > " + (work / "stdout.txt").string();
    int rc = 0;
    rc |= std::system((cli + " --threads 1 --json " + a.string() + " verify-all" + quiet).c_str());
    rc |= std::system((cli + " --threads 4 --json " + b.string() + " verify-all" + quiet).c_str());
    rc |= std::system((cli + " --threads 4 --json " + c.string() + " verify-all" + quiet).c_str());
    const auto ja = strip_runtime(a), jb = strip_runtime(b), jc = strip_runtime(c);
    const bool same = ja.dump() == jb.dump() && jb.dump() == jc.dump();
    return Outcome{rc == 0 && same && ja["overall"] == true,
                   std::string("exit codes ") + (rc == 0 ? "0" : "nonzero") + ", JSON " + (same ? "identical" : "differs")};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
