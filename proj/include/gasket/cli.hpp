#pragma once

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gasket/io.hpp"

namespace gasket {

namespace cli_detail {

namespace fs = std::filesystem;

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ContractError("cannot create output directory " + dir.string());
}

struct SpaceSpec {
  NormSpace space;
  double parameter = 0.0;
};

inline SpaceSpec parse_space(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  double param = 0.0;
  if (colon != std::string::npos) {
    try {
      param = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw ParseError("bad parameter in space spec '" + spec + "'");
    }
  }
  if (name == "besov") {
    if (colon == std::string::npos) throw ParseError("besov needs an alpha, e.g. besov:0.9");
    return {NormSpace::Besov, param};
  }
  if (name == "ttilde") {
    if (colon == std::string::npos) throw ParseError("ttilde needs a sigma, e.g. ttilde:1.1");
    return {NormSpace::Ttilde, param};
  }
  if (name == "t") {
    if (colon == std::string::npos) throw ParseError("t needs a sigma, e.g. t:2");
    return {NormSpace::T, param};
  }
  if (name == "tinf") return {NormSpace::Tinf, 0.0};
  throw ParseError("unknown space '" + name + "' (expected besov:a | ttilde:s | t:s | tinf)");
}

template <class S>
int run_harmonic(const std::string& a, const std::string& b, const std::string& c, int m,
                 const fs::path& out) {
  require_level(m);
  HarmonicFunction<S> h{{parse_scalar<S>(a), parse_scalar<S>(b), parse_scalar<S>(c)}};
  auto graph = to_graph(h, m);
  ensure_dir(out);
  atomic_write(out / "graph.json", to_json(graph).dump(2) + "\n");
  atomic_write(out / "trace.csv", trace_csv(restrict_to_line(graph)));
  std::cout << "wrote " << (out / "graph.json").string() << " and " << (out / "trace.csv").string()
            << "\n";
  return 0;
}

template <class S>
int run_trace_norm(const json& doc, const SpaceSpec& spec, const fs::path& out, bool svg) {
  auto f = line_from_json<S>(doc);
  NormReport report;
  switch (spec.space) {
    case NormSpace::Besov: report = besov_norm(f, spec.parameter); break;
    case NormSpace::Ttilde: report = ttilde_norm(f, spec.parameter); break;
    case NormSpace::T: report = t_norm(f, spec.parameter); break;
    case NormSpace::Tinf: report = tinf_norm(f); break;
    default: throw DomainError("unsupported space");
  }
  ensure_dir(out);
  atomic_write(out / "norm.json", to_json(report).dump(2) + "\n");
  atomic_write(out / "norm.csv", norm_csv(report));
  if (svg) {
    std::vector<std::pair<int, double>> pts;
    for (size_t i = 0; i < report.terms.size(); ++i)
      pts.push_back({report.levels[i], report.partials[i]});
    atomic_write(out / "norm.svg",
                 series_svg(make_series(norm_space_name(report.space) + std::string("-partials"),
                                        pts)));
  }
  std::cout << norm_space_name(report.space) << " value = " << format_scalar(report.value)
            << " (truncation level " << report.truncation_level << ")\n";
  return 0;
}

template <class S>
int run_extend(const json& doc, const std::string& map, int level, int corrector_level,
               const fs::path& out) {
  auto f = line_from_json<S>(doc);
  if (f.level < 1)
    throw ContractError("extension requires the genuine f(1/2) sample (level >= 1)");
  require_level(level);
  GraphFunction<S> result;
  if (map == "tilde") {
    result = tilde_extend(f, level);
  } else if (map == "full") {
    int cl = corrector_level > 0 ? corrector_level : std::max(4, level - 2);
    auto v0 = build_corrector<S>(CorrectorRole::V0, cl);
    result = full_extend(f, level, v0);
  } else if (map.rfind("partial:", 0) == 0) {
    int mt = 0;
    try {
      mt = std::stoi(map.substr(8));
    } catch (const std::exception&) {
      throw ParseError("bad truncation in '" + map + "'");
    }
    int cl = corrector_level > 0 ? corrector_level : std::max(4, level - 2);
    auto v0 = build_corrector<S>(CorrectorRole::V0, cl);
    auto v2 = build_corrector<S>(CorrectorRole::V2, cl);
    result = partial_extend(f, mt, level, v0, v2);
  } else {
    throw ParseError("unknown map '" + map + "' (expected tilde | full | partial:m)");
  }

  // Verification footer: restriction mismatch against the source grid. The
  // partial scheme is an approximant, not an extension, so the footer is
  // informative there.
  auto back = restrict_to_line(result).downsample(f.level);
  S worst(0);
  for (uint64_t k = 0; k < f.count(); ++k) {
    S d = back.samples[k] - f.samples[k];
    if (d < S(0)) d = -d;
    if (d > worst) worst = d;
  }
  json j = to_json(result);
  j["verification"] = {{"map", map}, {"max_restriction_error", format_scalar(worst)}};
  ensure_dir(out);
  atomic_write(out / "extension.json", j.dump(2) + "\n");
  std::cout << "max |(Ef)|_I - f| on source grid = " << format_scalar(worst) << "\n";
  return 0;
}

inline int run_verify(const std::string& suite, const VerifyConfig& cfg, const fs::path& out,
                      bool svg, bool write_bundle) {
  auto reports = run_suite(suite, cfg);
  if (write_bundle) ensure_dir(out);
  bool all_pass = true;
  std::vector<std::string> failing;
  for (const auto& r : reports) {
    std::string status = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    std::cout << status << "  " << r.id << ": " << r.summary << "\n";
    if (!r.pass && !r.skipped) {
      all_pass = false;
      failing.push_back(r.id);
    }
    if (write_bundle) {
      atomic_write(out / (r.id + ".json"), r.to_json().dump(2) + "\n");
      for (const auto& s : r.series) {
        atomic_write(out / (r.id + "." + s.name + ".csv"), series_csv(s));
        if (svg) atomic_write(out / (r.id + "." + s.name + ".svg"), series_svg(s));
      }
    }
  }
  if (write_bundle) {
    json summary = json::array();
    for (const auto& r : reports)
      summary.push_back({{"id", r.id}, {"pass", r.pass}, {"skipped", r.skipped}});
    atomic_write(out / "summary.json", summary.dump(2) + "\n");
  }
  if (!all_pass) {
    std::cout << "failing experiments:";
    for (const auto& id : failing) std::cout << " " << id;
    std::cout << "\n";
  }
  return all_pass ? 0 : 1;
}

inline int run_constants() {
  const auto& c = constants();
  auto row = [](const char* name, double v) { std::printf("%-28s %.12f\n", name, v); };
  row("b1 = log3/log5", c.b1);
  row("b2", c.b2);
  row("alpha(1)", c.alpha(1.0));
  row("alpha(b2)", c.alpha_b2());
  row("lambda+ = (17+sqrt73)/50", c.lambda_plus);
  row("lambda- = (17-sqrt73)/50", c.lambda_minus);
  row("log6/log5", c.log6_log5);
  row("2 - log3/log5", c.two_minus_b1);
  return 0;
}

}  // namespace cli_detail

// Exit codes: 0 success, 1 experiment failure, 2 parse error, 3 domain error,
// 4 input-contract error.
inline int run_cli(std::vector<std::string> args) {
  namespace fs = std::filesystem;
  CLI::App app{"trace and extension calculus on the Sierpinski gasket bottom line"};
  app.require_subcommand(1);

  std::string mode = "rational";
  std::string out_dir = ".";

  auto* cmd_constants = app.add_subcommand("constants", "print the critical constants");

  auto* cmd_harmonic =
      app.add_subcommand("harmonic", "evaluate a harmonic function and its bottom trace");
  std::string ha = "0", hb = "0", hc = "0";
  int hm = 4;
  cmd_harmonic->add_option("-a", ha, "boundary value h(q0)");
  cmd_harmonic->add_option("-b", hb, "boundary value h(q1)");
  cmd_harmonic->add_option("-c", hc, "boundary value h(q2)");
  cmd_harmonic->add_option("-m,--level", hm, "vertex level");
  cmd_harmonic->add_option("--mode", mode, "rational | floating");
  cmd_harmonic->add_option("-o,--out", out_dir, "output directory");

  auto* cmd_norm = app.add_subcommand("trace-norm", "compute a trace-space norm report");
  std::string norm_input, space_spec;
  bool svg = false;
  cmd_norm->add_option("input", norm_input, "line_function JSON file")->required();
  cmd_norm->add_option("--space", space_spec, "besov:a | ttilde:s | t:s | tinf")->required();
  cmd_norm->add_option("-o,--out", out_dir, "output directory");
  cmd_norm->add_flag("--svg", svg, "emit an SVG of the partial sums");

  auto* cmd_extend = app.add_subcommand("extend", "extend a line function to the gasket");
  std::string ext_input, ext_map = "tilde";
  int ext_level = 8, corrector_level = 0;
  cmd_extend->add_option("input", ext_input, "line_function JSON file")->required();
  cmd_extend->add_option("--map", ext_map, "tilde | full | partial:m");
  cmd_extend->add_option("-m,--level", ext_level, "output vertex level");
  cmd_extend->add_option("--corrector-level", corrector_level,
                         "corrector build level (default level-2)");
  cmd_extend->add_option("-o,--out", out_dir, "output directory");

  auto* cmd_verify = app.add_subcommand("verify", "run the experiment suite");
  std::string suite = "all";
  VerifyConfig vcfg;
  bool no_bundle = false;
  cmd_verify->add_option("suite", suite, "suite name or 'all' or 'list'");
  cmd_verify->add_option("--max-level", vcfg.max_level, "sweep depth (default 10)");
  cmd_verify->add_option("--seed", vcfg.seed, "random seed (default 0)");
  cmd_verify->add_option("--roundtrip-count", vcfg.roundtrip_count,
                         "number of round-trip samples");
  cmd_verify->add_option("--recursion-count", vcfg.recursion_triples,
                         "number of random recursion triples");
  cmd_verify->add_option("--sigma-grid", vcfg.sigma_grid, "sigma grid for the scans")
      ->delimiter(',');
  cmd_verify->add_option("--alpha-grid", vcfg.alpha_grid, "alpha grid for the scans")
      ->delimiter(',');
  cmd_verify->add_option("--one-sided-tol", vcfg.one_sided_tolerance,
                         "tolerance for the one-sided derivative comparison");
  cmd_verify->add_option("-o,--out", out_dir, "report bundle directory");
  cmd_verify->add_flag("--svg", svg, "emit SVG plots");
  cmd_verify->add_flag("--no-bundle", no_bundle, "skip writing report files");

  std::vector<const char*> argv;
  argv.push_back("gasket");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);  // --help
      std::cerr << e.what() << "\n";
      return 2;
    }

    if (cmd_constants->parsed()) return cli_detail::run_constants();

    if (cmd_harmonic->parsed()) {
      if (mode == "rational")
        return cli_detail::run_harmonic<Rational>(ha, hb, hc, hm, out_dir);
      if (mode == "floating") return cli_detail::run_harmonic<double>(ha, hb, hc, hm, out_dir);
      throw ParseError("unknown mode '" + mode + "'");
    }

    if (cmd_norm->parsed()) {
      auto doc = load_json(norm_input);
      auto spec = cli_detail::parse_space(space_spec);
      if (file_mode(doc) == "rational")
        return cli_detail::run_trace_norm<Rational>(doc, spec, out_dir, svg);
      return cli_detail::run_trace_norm<double>(doc, spec, out_dir, svg);
    }

    if (cmd_extend->parsed()) {
      auto doc = load_json(ext_input);
      if (file_mode(doc) == "rational")
        return cli_detail::run_extend<Rational>(doc, ext_map, ext_level, corrector_level,
                                                out_dir);
      return cli_detail::run_extend<double>(doc, ext_map, ext_level, corrector_level, out_dir);
    }

    if (cmd_verify->parsed()) {
      if (suite == "list") {
        for (const auto& name : suite_names()) std::cout << name << "\n";
        return 0;
      }
      return cli_detail::run_verify(suite, vcfg, out_dir, svg, !no_bundle);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const ContractError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace gasket
