#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "etest/errors.hpp"

namespace {

using etest::cli::Json;

// ETEST_LOG=info|debug turns on progress messages on stderr.
int log_level() {
  const char* env = std::getenv("ETEST_LOG");
  if (!env) return 0;
  const std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void note(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "[etest] " << msg << '\n';
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw etest::InputError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Json read_json(const std::string& path) {
  if (path.empty()) return Json();
  try {
    return Json::parse(slurp(path));
  } catch (const Json::parse_error& e) {
    throw etest::InputError(path + ": " + e.what());
  }
}

void emit(const std::string& body, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw etest::InputError("cannot write " + out_path);
  f << body;
  note(1, "wrote " + out_path);
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous tests: optimal construction, conversion and audits"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> e_value;
  std::optional<double> alpha;
  std::string paths_csv;

  auto common = [&](CLI::App* sub, bool with_seed, bool with_tol) {
    sub->add_option("--in", in_path, "input JSON (path or -)");
    sub->add_option("--out", out_path, "output path");
    if (with_seed) sub->add_option("--seed", seed, "random seed");
    if (with_tol) sub->add_option("--tol", tol, "solver tolerance");
  };
  auto* simple = app.add_subcommand("solve-simple", "optimal test for a simple null");
  common(simple, false, true);
  auto* composite = app.add_subcommand("solve-composite", "optimal test for a finite composite null");
  common(composite, true, true);
  auto* figure = app.add_subcommand("gaussian-figure", "Gaussian optimal-test curves as CSV");
  common(figure, false, false);
  auto* sim = app.add_subcommand("sequential-sim", "simulate a test martingale");
  common(sim, true, false);
  sim->add_option("--paths-csv", paths_csv, "write every wealth path here");
  auto* conv = app.add_subcommand("convert", "e-value to continuous/binary tests and p-values");
  common(conv, false, false);
  conv->add_option("--e", e_value, "e-value");
  conv->add_option("--alpha", alpha, "level");
  auto* aud = app.add_subcommand("audit", "validity, p-value and optional-stopping audits");
  common(aud, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const etest::cli::Options opt{seed, tol};
  try {
    if (simple->parsed()) {
      emit(pretty(etest::cli::solve_simple(read_json(in_path.empty() ? "-" : in_path), opt)), out_path);
    } else if (composite->parsed()) {
      emit(pretty(etest::cli::solve_composite(read_json(in_path.empty() ? "-" : in_path), opt)), out_path);
    } else if (figure->parsed()) {
      const auto files = etest::cli::gaussian_figure(read_json(in_path));
      if (files.size() == 1 && !out_path.empty()) {
        emit(files[0].second, out_path);
      } else {
        const std::filesystem::path dir = out_path.empty() ? "." : out_path;
        std::filesystem::create_directories(dir);
        for (const auto& [name, body] : files) emit(body, (dir / name).string());
      }
    } else if (sim->parsed()) {
      std::string csv;
      const Json summary = etest::cli::sequential_sim(read_json(in_path.empty() ? "-" : in_path), opt,
                                                      paths_csv.empty() ? nullptr : &csv);
      if (!paths_csv.empty()) emit(csv, paths_csv);
      emit(pretty(summary), out_path);
    } else if (conv->parsed()) {
      Json result;
      if (e_value) {
        if (!alpha) throw etest::InputError("--e needs --alpha");
        result = etest::cli::convert(Json{{"e", *e_value}, {"alpha", *alpha}});
      } else {
        const std::string text = slurp(in_path.empty() ? "-" : in_path);
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
          Json spec = Json::parse(text);
          if (spec.is_array()) {
            if (!alpha) throw etest::InputError("a bare array needs --alpha");
            spec = Json{{"e", spec}, {"alpha", *alpha}};
          } else if (alpha) {
            spec["alpha"] = *alpha;
          }
          result = etest::cli::convert(spec);
        } else {
          if (!alpha) throw etest::InputError("CSV input needs --alpha");
          result = etest::cli::convert_csv(text, *alpha);
        }
      }
      emit(pretty(result), out_path);
    } else if (aud->parsed()) {
      emit(pretty(etest::cli::audit(read_json(in_path.empty() ? "-" : in_path), opt)), out_path);
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return etest::cli::exit_code_for(e);
  }
  return 0;
}
