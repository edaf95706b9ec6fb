#include "femtopc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace femtopc {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "run.seed", "run.trials", "run.threads", "layout.kind", "layout.cell_radius",
    "layout.femto_radius", "layout.grid_size", "layout.n_femto", "layout.d_norm",
    "layout.df_norm", "layout.placements", "propagation.alpha_c", "propagation.alpha_fo",
    "propagation.beta", "propagation.f_MHz", "propagation.K_c_dB", "propagation.K_fi_dB",
    "propagation.K_fo_dB", "propagation.W_dB", "propagation.cross_link_origin",
    "targets.gamma_c_min_dB", "targets.gamma_c_max_dB", "targets.gamma_f_min_dB",
    "targets.gamma_f_max_dB", "targets.delta_c_dB", "game.p_max", "game.ab_pairs", "game.a",
    "game.b", "game.max_iter", "game.conv_tol", "protection.epsilon", "protection.t_dB",
    "protection.delta_y_dB", "protection.y0_W", "protection.M", "protection.max_epochs",
    "protection.tolerance", "contour.alphas", "contour.points", "contour.n_femto",
    "contour.cdf_layouts",
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  for (auto& p : parts) boost::trim(p);
  parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
  return parts;
}

std::pair<double, double> split_pair(const std::string& text) {
  std::vector<std::string> halves;
  boost::split(halves, text, boost::is_any_of(":"));
  if (halves.size() != 2) throw ConfigError("expected x:y pair, got '" + text + "'");
  return {std::stod(halves[0]), std::stod(halves[1])};
}

template <typename T>
void read(const pt::ptree& tree, const char* key, T& out) {
  if (tree.get_child_optional(key)) out = tree.get<T>(key);
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      if (!kKnownKeys.count(section + "." + key)) {
        throw ConfigError("unknown config key: " + section + "." + key);
      }
    }
  }

  ExperimentConfig cfg;
  try {
    read(tree, "run.seed", cfg.seed);
    read(tree, "run.trials", cfg.trials);
    read(tree, "run.threads", cfg.threads);

    if (auto kind = tree.get_optional<std::string>("layout.kind")) {
      if (*kind == "grid") {
        cfg.layout = LayoutKind::Grid;
      } else if (*kind == "random") {
        cfg.layout = LayoutKind::Random;
      } else {
        throw ConfigError("layout.kind must be grid or random");
      }
    }
    read(tree, "layout.cell_radius", cfg.layout_params.cell_radius);
    read(tree, "layout.femto_radius", cfg.layout_params.femto_radius);
    read(tree, "layout.grid_size", cfg.layout_params.grid_size);
    read(tree, "layout.d_norm", cfg.placement.d_norm);
    read(tree, "layout.df_norm", cfg.placement.df_norm);
    if (auto list = tree.get_optional<std::string>("layout.n_femto")) {
      cfg.n_values.clear();
      for (const auto& s : split_list(*list)) cfg.n_values.push_back(std::stoi(s));
    }
    if (auto list = tree.get_optional<std::string>("layout.placements")) {
      cfg.placements.clear();
      for (const auto& s : split_list(*list)) {
        const auto [d, df] = split_pair(s);
        cfg.placements.push_back({d, df});
      }
    }

    if (auto f = tree.get_optional<double>("propagation.f_MHz")) {
      cfg.propagation = PropagationParams::at_frequency(*f);
    }
    read(tree, "propagation.alpha_c", cfg.propagation.alpha_c);
    read(tree, "propagation.alpha_fo", cfg.propagation.alpha_fo);
    read(tree, "propagation.beta", cfg.propagation.beta);
    read(tree, "propagation.K_c_dB", cfg.propagation.K_c_dB);
    read(tree, "propagation.K_fi_dB", cfg.propagation.K_fi_dB);
    read(tree, "propagation.K_fo_dB", cfg.propagation.K_fo_dB);
    read(tree, "propagation.W_dB", cfg.propagation.W_dB);
    if (auto origin = tree.get_optional<std::string>("propagation.cross_link_origin")) {
      if (*origin == "user") {
        cfg.propagation.cross_link_origin = CrossLinkOrigin::User;
      } else if (*origin == "ap") {
        cfg.propagation.cross_link_origin = CrossLinkOrigin::AccessPoint;
      } else {
        throw ConfigError("propagation.cross_link_origin must be user or ap");
      }
    }

    read(tree, "targets.gamma_c_min_dB", cfg.gamma_c_min_dB);
    read(tree, "targets.gamma_c_max_dB", cfg.gamma_c_max_dB);
    read(tree, "targets.gamma_f_min_dB", cfg.gamma_f_min_dB);
    read(tree, "targets.gamma_f_max_dB", cfg.gamma_f_max_dB);
    read(tree, "targets.delta_c_dB", cfg.delta_c_dB);

    read(tree, "game.p_max", cfg.p_max);
    read(tree, "game.a", cfg.protection_ab.a);
    read(tree, "game.b", cfg.protection_ab.b);
    read(tree, "game.max_iter", cfg.game_max_iter);
    read(tree, "game.conv_tol", cfg.conv_tol);
    if (auto list = tree.get_optional<std::string>("game.ab_pairs")) {
      cfg.ab_pairs.clear();
      for (const auto& s : split_list(*list)) {
        const auto [a, b] = split_pair(s);
        cfg.ab_pairs.push_back({a, b});
      }
    }

    read(tree, "protection.epsilon", cfg.protection.epsilon);
    read(tree, "protection.t_dB", cfg.protection.t_dB);
    read(tree, "protection.delta_y_dB", cfg.protection.delta_y_dB);
    read(tree, "protection.M", cfg.protection.M);
    read(tree, "protection.max_epochs", cfg.protection.max_epochs);
    if (tree.get_child_optional("protection.y0_W")) {
      cfg.protection.y0 = tree.get<double>("protection.y0_W");
    }
    if (auto mode = tree.get_optional<std::string>("protection.tolerance")) {
      if (*mode == "db") {
        cfg.protection.mode = ToleranceMode::Decibel;
      } else if (*mode == "linear") {
        cfg.protection.mode = ToleranceMode::Linear;
      } else {
        throw ConfigError("protection.tolerance must be db or linear");
      }
    }

    if (auto list = tree.get_optional<std::string>("contour.alphas")) {
      cfg.alphas.clear();
      for (const auto& s : split_list(*list)) cfg.alphas.push_back(std::stod(s));
    }
    read(tree, "contour.points", cfg.contour_points);
    read(tree, "contour.n_femto", cfg.contour_n_femto);
    read(tree, "contour.cdf_layouts", cfg.cdf_layouts);
  } catch (const pt::ptree_bad_data& e) {
    throw ConfigError(std::string("malformed value: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("malformed value: ") + e.what());
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace femtopc
