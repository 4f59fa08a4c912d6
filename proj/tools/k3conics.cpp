// Command-line driver: builds the Golay code, the Leech minimal vectors, the
// conic census and the polarized lattice N, and reports every check.

#include "k3conics/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

enum ExitCode { kPass = 0, kMismatch = 1, kConstruction = 2, kBadFlags = 3 };

struct Flags {
  unsigned threads = k3conics::default_thread_count();
  std::string json;
  std::string octad_choice = "lex";
  std::string clique = "first";
  double clique_budget = 30;
  bool stats = false, steiner = false, counts = false, heavy = false, skip_heavy = false;
  std::string export_file, export_generator, export_dir;
};

k3conics::Options make_options(const Flags& f) {
  k3conics::Options o;
  o.threads = std::max(1u, f.threads);
  if (f.octad_choice != "lex") o.octad_choice = std::stoi(f.octad_choice);
  o.clique = f.clique == "all" ? k3conics::CliqueMode::all : k3conics::CliqueMode::first;
  o.clique_budget = std::chrono::milliseconds(static_cast<long>(f.clique_budget * 1000));
  return o;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

int finish(const k3conics::report::VerificationReport& r, const Flags& f) {
  k3conics::report::print_table(std::cout, r);
  if (!f.json.empty()) open_output(f.json) << r.to_json().dump(2) << '\n';
  return r.overall() ? kPass : kMismatch;
}

void export_golay(k3conics::Pipeline& p, const std::filesystem::path& words, const std::filesystem::path& gen) {
  if (!words.empty()) {
    auto os = open_output(words);
    k3conics::golay::export_codewords(os, p.normalized().code);
  }
  if (!gen.empty()) {
    auto os = open_output(gen);
    k3conics::golay::export_generator(os, p.normalized().code);
  }
}

void export_leech(k3conics::Pipeline& p, const std::filesystem::path& file) {
  auto os = open_output(file);
  k3conics::leech::export_vectors(os, k3conics::leech::all_minimal_vectors(p.normalized().code));
}

void export_conics(k3conics::Pipeline& p, const std::filesystem::path& file) {
  auto os = open_output(file);
  k3conics::census::export_conics(os, p.conics());
}

void export_ns(k3conics::Pipeline& p, const std::filesystem::path& file) {
  auto os = open_output(file);
  k3conics::ns::export_polarized(os, p.n_lattice());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Golay code, Leech lattice and the 800-conic K3 lattice checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(K3CONICS_VERSION));
  Flags f;
  app.add_option("--threads", f.threads, "worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
  app.add_option("--json", f.json, "write the JSON report to this file");

  auto* golay = app.add_subcommand("golay", "build the Golay code and check its invariants");
  golay->add_flag("--stats", f.stats, "print the weight distribution");
  golay->add_flag("--steiner", f.steiner, "check the Steiner system on all quintuples");
  golay->add_option("--export", f.export_file, "write all 4096 codewords, one 0/1 row each");
  golay->add_option("--export-generator", f.export_generator, "write the 12 generator rows");

  auto* leech = app.add_subcommand("leech", "enumerate the 196560 minimal Leech vectors");
  leech->add_flag("--counts", f.counts, "print the shape counts");
  leech->add_flag("--heavy", f.heavy, "cross-check with Fincke-Pohst on a Leech basis");
  leech->add_option("--export", f.export_file, "write all minimal vectors, sorted");

  auto* conics = app.add_subcommand("conics", "filter, classify and analyse the conics");
  auto* ns = app.add_subcommand("ns", "build S and N and run the lattice checks");
  auto* all = app.add_subcommand("verify-all", "run every stage and emit one report");
  for (auto* sub : {conics, ns, all}) {
    sub->add_option("--octad-choice", f.octad_choice, "frame octad: lex or 0..3")
        ->check(CLI::IsMember({"lex", "0", "1", "2", "3"}));
  }
  conics->add_option("--clique", f.clique, "first: least 16-clique; all: also count 16-cliques")
      ->check(CLI::IsMember({"first", "all"}));
  conics->add_option("--clique-budget", f.clique_budget, "seconds allowed for --clique all")->check(CLI::PositiveNumber);
  conics->add_option("--export", f.export_file, "write the conic list");
  ns->add_option("--export", f.export_file, "write Gram(N), h and the conic classes");
  all->add_flag("--skip-heavy", f.skip_heavy, "omit the Fincke-Pohst census cross-check");
  all->add_option("--export-dir", f.export_dir, "write every export into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadFlags;
  }

  try {
    k3conics::Options options = make_options(f);
    if (golay->parsed()) {
      options.steiner = f.steiner;
      k3conics::Pipeline p(options);
      auto r = p.single(&k3conics::Pipeline::golay_section);
      if (f.stats) {
        const auto wd = p.base_code().weight_distribution();
        std::cout << "weights 0:" << wd.w0 << " 8:" << wd.w8 << " 12:" << wd.w12 << " 16:" << wd.w16
                  << " 24:" << wd.w24 << '\n';
      }
      export_golay(p, f.export_file, f.export_generator);
      return finish(r, f);
    }
    if (leech->parsed()) {
      options.heavy = f.heavy;
      k3conics::Pipeline p(options);
      auto r = p.single(&k3conics::Pipeline::leech_section);
      if (f.counts) {
        const auto& checks = r.sections.front().checks;
        std::cout << "shapes (31, 20, 40) " << checks[0].computed.dump() << '\n';
        std::cout << "total " << checks[1].computed.dump() << '\n';
      }
      if (!f.export_file.empty()) export_leech(p, f.export_file);
      return finish(r, f);
    }
    if (conics->parsed()) {
      k3conics::Pipeline p(options);
      auto r = p.single(&k3conics::Pipeline::conics_section);
      const auto& d = r.sections.front().details;
      std::cout << "disjoint clique:";
      for (const auto& m : d["disjoint_clique"]) std::cout << ' ' << m["index"].get<std::size_t>();
      std::cout << '\n';
      if (d.contains("clique_count")) std::cout << "16-cliques: " << d["clique_count"].dump() << '\n';
      if (!f.export_file.empty()) export_conics(p, f.export_file);
      return finish(r, f);
    }
    if (ns->parsed()) {
      k3conics::Pipeline p(options);
      auto r = p.single(&k3conics::Pipeline::ns_section);
      if (!f.export_file.empty()) export_ns(p, f.export_file);
      return finish(r, f);
    }
    options.heavy = !f.skip_heavy;
    k3conics::Pipeline p(options);
    auto r = p.verify_all();
    if (!f.export_dir.empty()) {
      const std::filesystem::path dir(f.export_dir);
      std::filesystem::create_directories(dir);
      export_golay(p, dir / "golay_codewords.txt", dir / "golay_generator.txt");
      export_leech(p, dir / "leech_minimal.txt");
      export_conics(p, dir / "conics.txt");
      export_ns(p, dir / "ns_lattice.txt");
    }
    return finish(r, f);
  } catch (const k3conics::ConstructionError& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstruction;
  } catch (const k3conics::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kMismatch;
  } catch (const k3conics::LatticeError& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstruction;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConstruction;
  }
}
