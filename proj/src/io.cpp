#include "adiatrack/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace adiatrack::io {

namespace {

std::vector<double> number_row(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidArgument(std::string(what) + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

const json& require(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string(what) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InvalidArgument(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::vector<TransitionMatrix> matrix_list(const json& j) {
  if (!j.is_array()) throw InvalidArgument("schedule: 'mats' must be an array of matrices");
  std::vector<TransitionMatrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace

TransitionMatrix matrix_from_json(const json& j) {
  const json& rows = j.is_object() ? require(j, "rows", "matrix") : j;
  if (!rows.is_array() || rows.empty()) throw InvalidArgument("matrix: 'rows' must be a non-empty array");
  std::vector<std::vector<double>> parsed;
  for (const auto& r : rows) parsed.push_back(number_row(r, "matrix row"));
  if (j.is_object() && j.contains("n")) {
    const auto n = j.at("n").get<std::size_t>();
    if (n != parsed.size()) {
      throw InvalidArgument("matrix: n = " + std::to_string(n) + " but " +
                            std::to_string(parsed.size()) + " rows given");
    }
  }
  return TransitionMatrix(parsed);
}

json to_json(const TransitionMatrix& p) {
  json rows = json::array();
  for (State x = 0; x < p.size(); ++x) {
    auto r = p.row(x);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"n", p.size()}, {"rows", rows}};
}

TransitionMatrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InvalidArgument("matrix csv: cannot parse '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw InvalidArgument("matrix csv: trailing characters in '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("matrix csv: no rows");
  return TransitionMatrix(rows);
}

TransitionMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      return matrix_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw InvalidArgument(path.string() + ": " + e.what());
    }
  }
  return parse_matrix_csv(text);
}

double exponent_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfiniteExponent;
    throw InvalidArgument("exponent: only the string \"inf\" is accepted");
  }
  if (!j.is_number()) throw InvalidArgument("exponent: expected a number or \"inf\"");
  return j.get<double>();
}

json exponent_to_json(double gamma) {
  if (std::isinf(gamma)) return "inf";
  return gamma;
}

DriftParams drift_params_from_json(const json& j) {
  DriftParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw InvalidArgument("params: expected an object");
  p.c_p = number_or(j, "c_p", p.c_p);
  if (j.contains("gamma_p")) p.gamma_p = exponent_from_json(j.at("gamma_p"));
  p.c_pi = number_or(j, "c_pi", p.c_pi);
  p.gamma_pi = number_or(j, "gamma_pi", p.gamma_pi);
  p.validate();
  return p;
}

json to_json(const DriftParams& params) {
  return {{"c_p", params.c_p},
          {"gamma_p", exponent_to_json(params.gamma_p)},
          {"c_pi", params.c_pi},
          {"gamma_pi", params.gamma_pi}};
}

Schedule schedule_from_json(const json& j) {
  const auto kind = schedule_kind_from_string(require(j, "kind", "schedule").get<std::string>());
  const DriftParams params = drift_params_from_json(j.value("params", json()));
  Schedule s = [&] {
    switch (kind) {
      case ScheduleKind::constant: {
        if (j.contains("p")) return Schedule::constant(matrix_from_json(j.at("p")), params);
        auto mats = matrix_list(require(j, "mats", "constant schedule"));
        if (mats.size() != 1) throw InvalidArgument("constant schedule: exactly one matrix expected");
        return Schedule::constant(std::move(mats.front()), params);
      }
      case ScheduleKind::interpolation:
        return Schedule::interpolation(matrix_from_json(require(j, "p_start", "interpolation")),
                                       matrix_from_json(require(j, "p_end", "interpolation")),
                                       params);
      case ScheduleKind::cyclic:
        return Schedule::cyclic(matrix_list(require(j, "mats", "cyclic schedule")), params);
      case ScheduleKind::shrinking_state:
        return Schedule::shrinking_state(params);
      case ScheduleKind::restart_wrapped:
        return Schedule::restart_wrapped(
            schedule_from_json(require(j, "inner", "restart-wrapped")),
            require(j, "beta", "restart-wrapped").get<double>(),
            require(j, "beta_hat", "restart-wrapped").get<double>(),
            require(j, "x_restart", "restart-wrapped").get<State>(), params);
    }
    throw InvalidArgument("schedule: unhandled kind");
  }();
  if (j.contains("n") && j.at("n").get<std::size_t>() != s.n()) {
    throw InvalidArgument("schedule: declared n = " + std::to_string(j.at("n").get<std::size_t>()) +
                          " but the matrices have " + std::to_string(s.n()) + " states");
  }
  return s;
}

json to_json(const Schedule& s) {
  json j = {{"kind", to_string(s.kind())}, {"n", s.n()}, {"params", to_json(s.params())}};
  switch (s.kind()) {
    case ScheduleKind::constant:
      j["mats"] = json::array({to_json(s.mats().front())});
      break;
    case ScheduleKind::interpolation:
      j["p_start"] = to_json(s.mats()[0]);
      j["p_end"] = to_json(s.mats()[1]);
      break;
    case ScheduleKind::cyclic: {
      json mats = json::array();
      for (const auto& m : s.mats()) mats.push_back(to_json(m));
      j["mats"] = mats;
      break;
    }
    case ScheduleKind::shrinking_state:
      break;
    case ScheduleKind::restart_wrapped:
      j["inner"] = to_json(*s.inner());
      j["beta"] = s.beta();
      j["beta_hat"] = s.beta_hat();
      j["x_restart"] = s.x_restart();
      break;
  }
  return j;
}

RewardSpec reward_from_json(const json& j) {
  RewardSpec spec;
  spec.r = number_row(require(j, "r", "reward"), "reward 'r'");
  spec.beta = require(j, "beta", "reward").get<double>();
  spec.validate();
  return spec;
}

json to_json(const RewardSpec& spec) { return {{"r", spec.r}, {"beta", spec.beta}}; }

LearningRate rate_from_json(const json& j) {
  LearningRate rate;
  if (j.is_null()) return rate;
  rate.c_alpha = number_or(j, "c_alpha", rate.c_alpha);
  rate.gamma_alpha = number_or(j, "gamma_alpha", rate.gamma_alpha);
  rate.validate();
  return rate;
}

json to_json(const LearningRate& rate) {
  return {{"c_alpha", rate.c_alpha}, {"gamma_alpha", rate.gamma_alpha}};
}

NoiseModel noise_from_json(const json& j) {
  NoiseModel noise;
  if (j.is_null()) return noise;
  if (j.contains("kind")) noise.kind = noise_kind_from_string(j.at("kind").get<std::string>());
  noise.eps_max = number_or(j, "eps_max", noise.eps_max);
  noise.validate();
  return noise;
}

json to_json(const NoiseModel& noise) {
  return {{"kind", to_string(noise.kind)}, {"eps_max", noise.eps_max}};
}

json to_json(const CheckResult& c) { return {{"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}}; }

json to_json(const DriftReport& r) {
  json j = {{"t_max", r.t_max},
            {"max_scaled_drift", r.max_scaled_drift},
            {"min_scaled_pi", r.min_scaled_pi},
            {"max_rho", r.max_rho},
            {"exact_until", r.exact_until},
            {"pi_checkpoints", r.pi_checkpoints},
            {"passed", r.passed()}};
  if (r.violation) {
    j["violation"] = {{"bound", r.violation->bound},
                      {"t", r.violation->t},
                      {"measured", r.violation->measured},
                      {"declared", r.violation->declared}};
  }
  return j;
}

Thm2Constants constants_from_json(const json& j) {
  Thm2Constants c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw InvalidArgument("constants: expected an object");
  c.d_a = number_or(j, "d_a", c.d_a);
  c.d_b = number_or(j, "d_b", c.d_b);
  c.d_b_prime = number_or(j, "d_b_prime", c.d_b_prime);
  c.k = number_or(j, "k", c.k);
  c.r_max_eff = number_or(j, "r_max_eff", c.r_max_eff);
  c.rho = number_or(j, "rho", c.rho);
  c.beta = number_or(j, "beta", c.beta);
  c.c_alpha = number_or(j, "c_alpha", c.c_alpha);
  c.c_pi = number_or(j, "c_pi", c.c_pi);
  c.c_p = number_or(j, "c_p", c.c_p);
  c.delta = number_or(j, "delta", c.delta);
  c.tau_coeff = number_or(j, "tau_coeff", c.tau_coeff);
  c.validate();
  return c;
}

json to_json(const Thm2Constants& c) {
  return {{"d_a", c.d_a},     {"d_b", c.d_b},         {"d_b_prime", c.d_b_prime},
          {"k", c.k},         {"r_max_eff", c.r_max_eff}, {"rho", c.rho},
          {"beta", c.beta},   {"c_alpha", c.c_alpha}, {"c_pi", c.c_pi},
          {"c_p", c.c_p},     {"delta", c.delta},     {"tau_coeff", c.tau_coeff}};
}

ExponentTriple exponents_from_json(const json& j) {
  ExponentTriple e;
  if (j.is_null()) return e;
  if (j.contains("gamma_p")) e.gamma_p = exponent_from_json(j.at("gamma_p"));
  e.gamma_alpha = number_or(j, "gamma_alpha", e.gamma_alpha);
  e.gamma_pi = number_or(j, "gamma_pi", e.gamma_pi);
  e.validate();
  return e;
}

json to_json(const ExponentTriple& e) {
  return {{"gamma_p", exponent_to_json(e.gamma_p)},
          {"gamma_alpha", e.gamma_alpha},
          {"gamma_pi", e.gamma_pi}};
}

json to_json(const BoundReport& r) {
  return {{"spec_version", kSpecVersion},
          {"ada1", r.ada1},
          {"ada2", r.ada2},
          {"ada3", r.ada3},
          {"ada4", r.ada4},
          {"total", r.total},
          {"tau", r.tau},
          {"tau_coeff", r.tau_coeff},
          {"regime", to_string(r.regime.regime)},
          {"same_rate_as_static", r.regime.same_rate_as_static},
          {"conjectured_adiabatic", r.regime.conjectured_adiabatic}};
}

std::string canonical_dump(const json& j) { return j.dump(); }

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_dump(j)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) {
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
  }
  return json(v).dump();
}

std::string trace_csv(const TrackingTrace& trace) {
  std::string out = "t,sup_error,alpha_t,pi_min_t,drift_t\n";
  for (const auto& cp : trace.checkpoints) {
    out += std::to_string(cp.t);
    for (double v : {cp.sup_error, cp.alpha_t, cp.pi_min_t, cp.drift_t}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string trace_file_name(const std::string& hash, std::uint64_t seed) {
  return hash + "_" + std::to_string(seed) + ".csv";
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace adiatrack::io
