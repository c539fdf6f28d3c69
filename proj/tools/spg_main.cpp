#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spg/errors.hpp"
#include "spg/fd.hpp"
#include "spg/gridsearch.hpp"
#include "spg/io.hpp"
#include "spg/leader.hpp"
#include "spg/nash.hpp"
#include "spg/validation.hpp"

namespace {

using json = nlohmann::ordered_json;

json vec_to_json(const spg::Vec& v) {
  json a = json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

spg::Vec to_vec(const std::vector<double>& v) {
  spg::Vec out(static_cast<int>(v.size()));
  for (size_t k = 0; k < v.size(); ++k) out(static_cast<int>(k)) = v[k];
  return out;
}

// "1,2;3,4" -> {[1,2], [3,4]}
std::vector<spg::Vec> parse_seed_list(const std::string& text) {
  std::vector<spg::Vec> out;
  std::vector<double> cur;
  std::string num;
  auto flush_num = [&]() {
    if (num.empty()) throw spg::Error("seed list: empty number");
    size_t used = 0;
    cur.push_back(std::stod(num, &used));
    if (used != num.size())
      throw spg::Error("seed list: bad number '" + num + "'");
    num.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush_num();
    } else if (c == ';') {
      flush_num();
      out.push_back(to_vec(cur));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      num += c;
    }
  }
  flush_num();
  out.push_back(to_vec(cur));
  return out;
}

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw spg::IoError("cannot open " + out_path + " for writing");
  f << payload;
  f.flush();
  if (!f) throw spg::IoError("write failure on " + out_path);
}

spg::PricingGame load_validated(const std::string& path) {
  spg::GameFile doc = spg::parse_game_file(path);
  const spg::ValidationReport report = spg::validate_game(doc.game);
  if (!report.ok())
    throw spg::Error("game failed validation:\n" + report.summary());
  return std::move(doc.game);
}

int run_validate(const std::string& game_path, const std::string& out_path,
                 const std::string& format) {
  spg::GameFile doc = spg::parse_game_file(game_path);
  const spg::ValidationReport report = spg::validate_game(doc.game);
  std::string payload;
  if (format == "csv") {
    payload = "name,pass,detail\n";
    for (const auto& c : report.checks)
      payload += c.name + "," + (c.pass ? "1" : "0") + "," + c.detail + "\n";
  } else {
    json j = json::object();
    j["schema"] = doc.schema;
    j["ok"] = report.ok();
    json checks = json::array();
    for (const auto& c : report.checks) {
      json cj = json::object();
      cj["name"] = c.name;
      cj["pass"] = c.pass;
      cj["detail"] = c.detail;
      checks.push_back(std::move(cj));
    }
    j["checks"] = std::move(checks);
    j["warnings"] = report.warnings;
    payload = j.dump(2) + "\n";
  }
  emit(payload, out_path);
  return report.ok() ? 0 : 2;
}

int run_nash(const std::string& game_path, const std::string& out_path,
             const std::string& format, const std::vector<double>& pi_in,
             double eps, std::optional<double> gamma,
             std::optional<int> max_iter) {
  const spg::PricingGame game = load_validated(game_path);
  spg::NashConfig cfg;
  cfg.eps = eps;
  cfg.gamma = gamma;
  if (max_iter) cfg.max_iter = *max_iter;
  const spg::Vec pi = to_vec(pi_in);
  const spg::NashResult res = spg::solve_nash(game, pi, cfg);
  const spg::NashVerification check = spg::verify_nash(game, res.x, pi);

  std::string payload;
  if (format == "csv") {
    payload = "follower";
    for (int k = 1; k <= game.follower_dim(); ++k)
      payload += ",x_" + std::to_string(k);
    payload += "\n";
    char buf[64];
    for (int i = 0; i < game.num_followers(); ++i) {
      payload += std::to_string(i);
      for (int k = 0; k < game.follower_dim(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", res.x.block(i)(k));
        payload += std::string(",") + buf;
      }
      payload += "\n";
    }
  } else {
    json j = json::object();
    j["pi"] = vec_to_json(pi);
    j["iterations"] = res.iterations;
    j["residual"] = res.residual;
    json blocks = json::array();
    for (int i = 0; i < game.num_followers(); ++i)
      blocks.push_back(vec_to_json(res.x.block(i)));
    j["x"] = std::move(blocks);
    j["sigma"] = vec_to_json(res.x.aggregate());
    j["leader_value"] = game.objective->value(res.x, pi);
    j["worst_deviation"] = check.worst_deviation;
    j["warnings"] = res.warnings;
    payload = j.dump(2) + "\n";
  }
  emit(payload, out_path);
  return 0;
}

int run_solve(const std::string& game_path, const std::string& out_path,
              const std::string& format, const std::vector<double>& pi0_in,
              const std::string& seed_list, const spg::LeaderConfig& lcfg,
              double eps, double tau_act) {
  const spg::PricingGame game = load_validated(game_path);
  spg::NashConfig ncfg;
  ncfg.eps = eps;
  spg::SensitivityConfig scfg;
  scfg.tau_act = tau_act;

  std::vector<spg::Vec> starts;
  if (!seed_list.empty()) {
    starts = parse_seed_list(seed_list);
  } else if (!pi0_in.empty()) {
    starts.push_back(to_vec(pi0_in));
  } else {
    starts.push_back(0.5 * (game.price_lo + game.price_hi));
  }

  std::optional<spg::StackelbergResult> best;
  json runs = json::array();
  for (const auto& pi0 : starts) {
    spg::StackelbergResult res =
        spg::solve_stackelberg(game, pi0, ncfg, lcfg, scfg);
    json rj = json::object();
    rj["pi0"] = vec_to_json(pi0);
    rj["value"] = res.value;
    rj["termination"] = res.termination;
    rj["iterations"] = static_cast<int>(res.trace.rows.size());
    runs.push_back(std::move(rj));
    if (!best || res.value < best->value) best = std::move(res);
  }

  json summary = json::object();
  summary["pi"] = vec_to_json(best->pi);
  summary["value"] = best->value;
  summary["termination"] = best->termination;
  summary["iterations"] = static_cast<int>(best->trace.rows.size());
  summary["grad_norm"] =
      best->gradient.size() > 0 ? best->gradient.norm() : 0.0;
  json blocks = json::array();
  for (int i = 0; i < game.num_followers(); ++i)
    blocks.push_back(vec_to_json(best->x.block(i)));
  summary["x"] = std::move(blocks);
  summary["sigma"] = vec_to_json(best->x.aggregate());
  summary["warnings"] = best->warnings;
  summary["runs"] = std::move(runs);

  const std::string trace_payload = format == "csv"
                                        ? spg::trace_to_csv(best->trace)
                                        : spg::trace_to_json_text(best->trace);
  if (out_path.empty()) {
    std::cout << trace_payload;
    std::cerr << summary.dump(2) << "\n";
  } else {
    spg::write_trace(best->trace, out_path, format);
    std::cout << summary.dump(2) << "\n";
  }
  return 0;
}

int run_grid(const std::string& game_path, const std::string& out_path,
             const std::string& format, int points, double eps) {
  const spg::PricingGame game = load_validated(game_path);
  spg::NashConfig ncfg;
  ncfg.eps = eps;
  const spg::GridResult res = spg::grid_search(game, points, ncfg);

  std::string payload;
  if (format == "csv") {
    payload = "rank";
    for (int k = 1; k <= game.price_dim(); ++k)
      payload += ",pi_" + std::to_string(k);
    payload += ",JL\n";
    char buf[64];
    for (size_t n = 0; n < res.ranked.size(); ++n) {
      payload += std::to_string(n + 1);
      for (int k = 0; k < game.price_dim(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", res.ranked[n].pi(k));
        payload += std::string(",") + buf;
      }
      std::snprintf(buf, sizeof(buf), "%.17g", res.ranked[n].value);
      payload += std::string(",") + buf + "\n";
    }
  } else {
    json rows = json::array();
    for (size_t n = 0; n < res.ranked.size(); ++n) {
      json rj = json::object();
      rj["rank"] = n + 1;
      rj["pi"] = vec_to_json(res.ranked[n].pi);
      rj["JL"] = res.ranked[n].value;
      rows.push_back(std::move(rj));
    }
    payload = rows.dump(2) + "\n";
  }
  emit(payload, out_path);
  return 0;
}

int run_fd_check(const std::string& game_path, const std::string& out_path,
                 const std::string& format, const std::string& what,
                 const std::vector<double>& pi_in, double step, double eps,
                 double tau_act) {
  const spg::PricingGame game = load_validated(game_path);
  const spg::Vec pi = pi_in.empty() ? 0.5 * (game.price_lo + game.price_hi)
                                    : to_vec(pi_in);
  spg::NashConfig ncfg;
  ncfg.eps = eps;
  spg::SensitivityConfig scfg;
  scfg.tau_act = tau_act;
  scfg.nash_eps = eps;

  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  json j = json::object();
  j["what"] = what;
  j["pi"] = vec_to_json(pi);
  j["step"] = step;
  std::string csv;
  if (what == "jacobian") {
    const spg::NashResult nash = spg::solve_nash(game, pi, ncfg);
    const auto sens = spg::game_jacobians(game, nash.x, pi, scfg);
    json rows = json::array();
    csv = "follower,max_abs_diff\n";
    double worst = 0.0;
    for (int i = 0; i < game.num_followers(); ++i) {
      const spg::Mat fd = spg::fd_jacobian(
          game.followers[static_cast<size_t>(i)], nash.x.aggregate_excluding(i),
          pi, step);
      const double diff =
          (fd - sens[static_cast<size_t>(i)].jacobian).cwiseAbs().maxCoeff();
      worst = std::max(worst, diff);
      json rj = json::object();
      rj["follower"] = i;
      rj["max_abs_diff"] = diff;
      rows.push_back(std::move(rj));
      csv += std::to_string(i) + "," + num(diff) + "\n";
    }
    j["followers"] = std::move(rows);
    j["max_abs_diff"] = worst;
  } else if (what == "gradient") {
    const spg::FdGradientReport rep =
        spg::fd_total_gradient(game, pi, step, ncfg, scfg);
    j["fd"] = vec_to_json(rep.fd);
    j["assembled"] = vec_to_json(rep.assembled);
    j["discrepancy"] = rep.discrepancy;
    csv = "k,fd,assembled,abs_diff\n";
    for (int k = 0; k < rep.fd.size(); ++k)
      csv += std::to_string(k + 1) + "," + num(rep.fd(k)) + "," +
             num(rep.assembled(k)) + "," +
             num(std::abs(rep.fd(k) - rep.assembled(k))) + "\n";
  } else {
    throw spg::Error("--what must be 'jacobian' or 'gradient', got '" + what +
                     "'");
  }
  emit(format == "csv" ? csv : j.dump(2) + "\n", out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg pricing-game solver"};
  app.require_subcommand(1);

  std::string game_path, out_path;
  // One format slot per subcommand: only the parsed one is read back.
  std::string fmt_validate = "json", fmt_nash = "json", fmt_solve = "csv",
              fmt_grid = "csv", fmt_fd = "json";

  auto add_common = [&](CLI::App* cmd, std::string* format_slot) {
    cmd->add_option("--game", game_path, "game or scenario file (JSON)")
        ->required();
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    if (format_slot != nullptr)
      cmd->add_option("--format", *format_slot, "output format: csv or json")
          ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* c_validate = app.add_subcommand("validate", "check game assumptions");
  add_common(c_validate, &fmt_validate);

  CLI::App* c_nash = app.add_subcommand("nash", "equilibrium at a fixed price");
  add_common(c_nash, &fmt_nash);
  std::vector<double> pi_in;
  double eps = 1e-8;
  double gamma_in = 0.0;
  int max_iter_in = 0;
  c_nash->add_option("--pi", pi_in, "price vector")->delimiter(',')->required();
  c_nash->add_option("--eps", eps, "fixed-point stopping tolerance");
  CLI::Option* gamma_opt =
      c_nash->add_option("--gamma", gamma_in, "override the contraction step");
  CLI::Option* max_iter_opt =
      c_nash->add_option("--max-iter", max_iter_in, "iteration cap override");

  CLI::App* c_solve = app.add_subcommand("solve", "local Stackelberg descent");
  add_common(c_solve, &fmt_solve);
  std::vector<double> pi0_in;
  std::string seed_list;
  spg::LeaderConfig lcfg;
  double tau_act = 1e-6;
  c_solve->add_option("--pi0", pi0_in, "initial price (default: box midpoint)")
      ->delimiter(',');
  c_solve->add_option("--seed-list", seed_list,
                      "semicolon-separated initial prices, e.g. '4,2;3,3'");
  c_solve->add_option("--beta", lcfg.beta, "backtracking factor");
  c_solve->add_option("--sbar", lcfg.s_bar, "base step size");
  c_solve->add_option("--delta", lcfg.delta, "sufficient-decrease parameter");
  c_solve->add_option("--eps", eps, "follower fixed-point tolerance");
  c_solve->add_option("--max-outer", lcfg.max_outer, "outer iteration cap");
  c_solve->add_option("--l-max", lcfg.l_max, "Armijo exponent cap");
  c_solve->add_option("--tau-act", tau_act, "active-set tolerance");
  double stat_tol_in = 0.0;
  CLI::Option* stat_tol_opt =
      c_solve->add_option("--stat-tol", stat_tol_in, "stationarity tolerance");

  CLI::App* c_grid = app.add_subcommand("grid", "uniform grid baseline");
  add_common(c_grid, &fmt_grid);
  int points = 11;
  c_grid->add_option("--points", points, "grid points per axis");
  c_grid->add_option("--eps", eps, "follower fixed-point tolerance");

  CLI::App* c_fd = app.add_subcommand("fd-check", "finite-difference probes");
  add_common(c_fd, &fmt_fd);
  std::string what = "jacobian";
  double step = 1e-6;
  c_fd->add_option("--what", what, "jacobian or gradient")
      ->check(CLI::IsMember({"jacobian", "gradient"}));
  c_fd->add_option("--pi", pi_in, "price vector (default: box midpoint)")
      ->delimiter(',');
  c_fd->add_option("--step", step, "difference step");
  c_fd->add_option("--eps", eps, "follower fixed-point tolerance");
  c_fd->add_option("--tau-act", tau_act, "active-set tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_validate->parsed())
      return run_validate(game_path, out_path, fmt_validate);
    if (c_nash->parsed()) {
      std::optional<double> gamma;
      if (gamma_opt->count() > 0) gamma = gamma_in;
      std::optional<int> max_iter;
      if (max_iter_opt->count() > 0) max_iter = max_iter_in;
      return run_nash(game_path, out_path, fmt_nash, pi_in, eps, gamma,
                      max_iter);
    }
    if (c_solve->parsed()) {
      if (stat_tol_opt->count() > 0) lcfg.stat_tol = stat_tol_in;
      return run_solve(game_path, out_path, fmt_solve, pi0_in, seed_list, lcfg,
                       eps, tau_act);
    }
    if (c_grid->parsed())
      return run_grid(game_path, out_path, fmt_grid, points, eps);
    if (c_fd->parsed())
      return run_fd_check(game_path, out_path, fmt_fd, what, pi_in, step, eps,
                          tau_act);
  } catch (const spg::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const spg::NonconvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const spg::StaleEquilibriumError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const spg::UnreliableStencilError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const spg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
