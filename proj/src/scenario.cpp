// mmpgp - link-level simulator for mmWave massive-MIMO downlink per-group precoding
// Copyright (C) 2026 the mmpgp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mmpgp/scenario.hpp"

#include <fstream>
#include <sstream>

namespace mmpgp {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (const char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(ch);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size())
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return d;
}

arma::uword to_count(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0 || d != std::floor(d))
    throw std::invalid_argument("config: " + key + " must be a non-negative integer");
  return static_cast<arma::uword>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " must be true or false");
}

PrecoderKind precoder_from(const std::string& name) {
  if (name == "ZFP") return PrecoderKind::kZfp;
  if (name == "ZF_PGP") return PrecoderKind::kZfPgp;
  if (name == "VAAC_PGP") return PrecoderKind::kVaacPgp;
  throw std::invalid_argument("config: unknown precoder: " + name);
}

}  // namespace

void ScenarioConfig::validate() const {
  geometry.validate();
  propagation.validate();
  if (n_ue < 1) throw std::invalid_argument("config: n_ue must be >= 1");
  if (snr_sweep_db.empty())
    throw std::invalid_argument("config: snr_sweep_db must not be empty");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (precoders.empty())
    throw std::invalid_argument("config: precoders must not be empty");
  if (modulation != 2 && modulation != 4 && modulation != 16 &&
      modulation != 64)
    throw std::invalid_argument("config: modulation must be 2, 4, 16 or 64");
  if (gh_order < 2 || gh_order > 30)
    throw std::invalid_argument("config: gh_order must be in [2, 30]");
  if (n_beams < 1 || n_beams > geometry.n_elements())
    throw std::invalid_argument("config: n_beams must be in [1, N_T]");
  if (capture_fraction &&
      (!(*capture_fraction > 0.0) || *capture_fraction > 1.0))
    throw std::invalid_argument("config: capture_fraction must be in (0, 1]");
  if (grouping.n_groups < 2 || grouping.n_groups > 4)
    throw std::invalid_argument("config: n_groups must be 2, 3 or 4");
  if (opgpa_is_bits) {
    const double top = 2.0 * std::log2(static_cast<double>(modulation));
    if (*opgpa_is_bits < 0.0 || *opgpa_is_bits >= top)
      throw std::invalid_argument("config: opgpa_is must be in [0, 2*log2(M))");
  }
}

ScenarioConfig scenario1() {
  ScenarioConfig cfg;
  cfg.name = "scenario1";
  cfg.n_ue = 10;
  cfg.geometry.r_inner = 1.0;
  cfg.geometry.r_outer = 5.0;
  cfg.geometry.height = 3.0;
  cfg.geometry.n_ux = 10;
  cfg.geometry.n_uz = 10;
  cfg.geometry.spacing = 0.5;
  cfg.n_beams = 20;
  cfg.grouping.n_groups = 3;
  cfg.mode = SubgroupMode::kSimple;
  cfg.modulation = 16;
  cfg.gh_order = 10;
  cfg.snr_sweep_db = {0, 5, 10, 15, 20, 25, 30};
  cfg.operating_snr_db = 30.0;
  cfg.trials = 20;
  cfg.ref_se = 26.33;
  cfg.ref_seua = 0.3647;
  cfg.ref_snr_db = 30.0;
  return cfg;
}

ScenarioConfig scenario2() {
  ScenarioConfig cfg = scenario1();
  cfg.name = "scenario2";
  cfg.n_ue = 20;
  cfg.geometry.r_outer = 20.0;
  cfg.snr_sweep_db = {0, 10, 20, 30, 40, 50, 60};
  cfg.operating_snr_db = 60.0;
  cfg.ref_se = 31.50;
  cfg.ref_seua = 0.0252;
  cfg.ref_snr_db = 60.0;
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);

  ScenarioConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty())
      throw std::invalid_argument("config: empty value for " + key);

    if (key == "name") cfg.name = val;
    else if (key == "n_ue") cfg.n_ue = to_count(key, val);
    else if (key == "r_inner_m") cfg.geometry.r_inner = to_double(key, val);
    else if (key == "r_outer_m") cfg.geometry.r_outer = to_double(key, val);
    else if (key == "bs_height_m") cfg.geometry.height = to_double(key, val);
    else if (key == "n_ux") cfg.geometry.n_ux = to_count(key, val);
    else if (key == "n_uz") cfg.geometry.n_uz = to_count(key, val);
    else if (key == "element_spacing") cfg.geometry.spacing = to_double(key, val);
    else if (key == "r_break_m") cfg.propagation.r_break = to_double(key, val);
    else if (key == "k_los") cfg.propagation.k_los = to_double(key, val);
    else if (key == "k_nlos") cfg.propagation.k_nlos = to_double(key, val);
    else if (key == "m_los") cfg.propagation.m_los = to_double(key, val);
    else if (key == "m_nlos") cfg.propagation.m_nlos = to_double(key, val);
    else if (key == "p_block") cfg.propagation.p_block = to_double(key, val);
    else if (key == "n_beams") cfg.n_beams = to_count(key, val);
    else if (key == "capture_fraction") cfg.capture_fraction = to_double(key, val);
    else if (key == "n_groups") cfg.grouping.n_groups = to_count(key, val);
    else if (key == "nlos_boost_db") cfg.grouping.nlos_boost_db = to_double(key, val);
    else if (key == "split_threshold") cfg.grouping.split_threshold = to_double(key, val);
    else if (key == "auto_split") cfg.grouping.auto_split = to_bool(key, val);
    else if (key == "jsdm_subgroups") cfg.grouping.jsdm_subgroups = to_count(key, val);
    else if (key == "mode") cfg.mode = subgroup_mode_from(val);
    else if (key == "nlos_mode") cfg.nlos_mode = subgroup_mode_from(val);
    else if (key == "modulation") cfg.modulation = to_count(key, val);
    else if (key == "gh_order") cfg.gh_order = to_count(key, val);
    else if (key == "snr_sweep_db") {
      cfg.snr_sweep_db.clear();
      for (const auto& v : split_list(val))
        cfg.snr_sweep_db.push_back(to_double(key, v));
    } else if (key == "operating_snr_db") cfg.operating_snr_db = to_double(key, val);
    else if (key == "precoders") {
      cfg.precoders.clear();
      for (const auto& v : split_list(val)) cfg.precoders.push_back(precoder_from(v));
    } else if (key == "trials") cfg.trials = to_count(key, val);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_double(key, val));
    else if (key == "opgpa_is") cfg.opgpa_is_bits = to_double(key, val);
    else if (key == "snr1_db") cfg.snr1_db = to_double(key, val);
    else if (key == "mai_convention") {
      if (val == "printed") cfg.mai_convention = SnrConvention::kPrinted;
      else if (val == "sinr") cfg.mai_convention = SnrConvention::kSinr;
      else throw std::invalid_argument("config: mai_convention must be printed or sinr");
    } else if (key == "dump_mai") cfg.dump_mai = to_bool(key, val);
    else if (key == "ref_se") cfg.ref_se = to_double(key, val);
    else if (key == "ref_seua") cfg.ref_seua = to_double(key, val);
    else if (key == "ref_snr_db") cfg.ref_snr_db = to_double(key, val);
    else if (key == "out_dir") cfg.out_dir = val;
    else throw std::invalid_argument("config: unknown key: " + key);
  }
  cfg.validate();
  return cfg;
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << "name = " << cfg.name << "\n";
  out << "n_ue = " << cfg.n_ue << "\n";
  out << "r_inner_m = " << cfg.geometry.r_inner << "\n";
  out << "r_outer_m = " << cfg.geometry.r_outer << "\n";
  out << "bs_height_m = " << cfg.geometry.height << "\n";
  out << "n_ux = " << cfg.geometry.n_ux << "\n";
  out << "n_uz = " << cfg.geometry.n_uz << "\n";
  out << "element_spacing = " << cfg.geometry.spacing << "\n";
  out << "r_break_m = " << cfg.propagation.r_break << "\n";
  out << "k_los = " << cfg.propagation.k_los << "\n";
  out << "k_nlos = " << cfg.propagation.k_nlos << "\n";
  out << "m_los = " << cfg.propagation.m_los << "\n";
  out << "m_nlos = " << cfg.propagation.m_nlos << "\n";
  out << "p_block = " << cfg.propagation.p_block << "\n";
  out << "n_beams = " << cfg.n_beams << "\n";
  if (cfg.capture_fraction) out << "capture_fraction = " << *cfg.capture_fraction << "\n";
  out << "n_groups = " << cfg.grouping.n_groups << "\n";
  out << "nlos_boost_db = " << cfg.grouping.nlos_boost_db << "\n";
  out << "split_threshold = " << cfg.grouping.split_threshold << "\n";
  out << "auto_split = " << (cfg.grouping.auto_split ? "true" : "false") << "\n";
  out << "jsdm_subgroups = " << cfg.grouping.jsdm_subgroups << "\n";
  out << "mode = " << to_string(cfg.mode) << "\n";
  if (cfg.nlos_mode) out << "nlos_mode = " << to_string(*cfg.nlos_mode) << "\n";
  out << "modulation = " << cfg.modulation << "\n";
  out << "gh_order = " << cfg.gh_order << "\n";
  out << "snr_sweep_db =";
  for (const double v : cfg.snr_sweep_db) out << " " << v;
  out << "\n";
  out << "operating_snr_db = " << cfg.operating_snr_db << "\n";
  out << "precoders =";
  for (const auto k : cfg.precoders) out << " " << to_string(k);
  out << "\n";
  out << "trials = " << cfg.trials << "\n";
  out << "seed = " << cfg.seed << "\n";
  if (cfg.opgpa_is_bits) out << "opgpa_is = " << *cfg.opgpa_is_bits << "\n";
  if (cfg.snr1_db) out << "snr1_db = " << *cfg.snr1_db << "\n";
  out << "mai_convention = "
      << (cfg.mai_convention == SnrConvention::kPrinted ? "printed" : "sinr")
      << "\n";
  out << "dump_mai = " << (cfg.dump_mai ? "true" : "false") << "\n";
  if (cfg.ref_se) out << "ref_se = " << *cfg.ref_se << "\n";
  if (cfg.ref_seua) out << "ref_seua = " << *cfg.ref_seua << "\n";
  if (cfg.ref_snr_db) out << "ref_snr_db = " << *cfg.ref_snr_db << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
}

}  // namespace mmpgp
