#include "jbc/json_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace jbc {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!out) throw ParseError("write failed for " + path);
}

json complex_to_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(what + ": complex entries must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(what + " entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

json vec_to_json(const Vec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

CVec cvec_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  CVec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v[i] = complex_from_json(j[i], what);
  }
  return v;
}

json cvec_to_json(const CVec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(complex_to_json(v[i]));
  return j;
}

CMat cmat_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + " must be a nonempty array of rows");
  const size_t rows = j.size();
  size_t cols = 0;
  CMat m;
  for (size_t r = 0; r < rows; ++r) {
    const CVec row = cvec_from_json(j[r], what);
    if (r == 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (static_cast<size_t>(row.size()) != cols) {
      throw ParseError(what + ": ragged rows");
    }
    m.row(r) = row.transpose();
  }
  return m;
}

json cmat_to_json(const CMat& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(complex_to_json(m(r, c)));
    }
    j.push_back(row);
  }
  return j;
}

}  // namespace

ProblemInstance load_instance(const std::string& path) {
  const json j = read_json_file(path);
  for (const char* key : {"M", "K", "channels", "sigma2", "gamma_db", "cbar"}) {
    if (!j.contains(key)) throw ParseError(path + ": missing field " + key);
  }
  if (!j["M"].is_number_integer() || !j["K"].is_number_integer()) {
    throw ParseError(path + ": M and K must be integers");
  }
  const int M = j["M"].get<int>();
  const int K = j["K"].get<int>();
  if (!j["channels"].is_array() || static_cast<int>(j["channels"].size()) != K) {
    std::ostringstream os;
    os << path << ": expected " << K << " channel rows, got "
       << j["channels"].size();
    throw ParseError(os.str());
  }
  std::vector<CVec> channels;
  channels.reserve(K);
  for (int k = 0; k < K; ++k) {
    CVec row = cvec_from_json(j["channels"][k], "channels");
    if (row.size() != M) {
      std::ostringstream os;
      os << path << ": channel row " << k << " has length " << row.size()
         << ", expected " << M;
      throw ParseError(os.str());
    }
    channels.push_back(std::move(row));
  }
  try {
    return ProblemInstance::from_db(std::move(channels),
                                    vec_from_json(j["sigma2"], "sigma2"),
                                    vec_from_json(j["gamma_db"], "gamma_db"),
                                    vec_from_json(j["cbar"], "cbar"));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  json j;
  j["M"] = inst.M;
  j["K"] = inst.K;
  json ch = json::array();
  for (const auto& row : inst.channels) ch.push_back(cvec_to_json(row));
  j["channels"] = std::move(ch);
  j["sigma2"] = vec_to_json(inst.sigma2);
  j["gamma_db"] = vec_to_json(inst.gamma_db);
  j["cbar"] = vec_to_json(inst.cbar);
  write_text_file(path, j.dump(2) + "\n");
}

SolutionBundle load_solution(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.contains("primal") || !j.contains("dual")) {
    throw ParseError(path + ": solution needs primal and dual sections");
  }
  const json& p = j["primal"];
  const json& d = j["dual"];
  for (const char* key : {"beamformers", "Q", "powers", "directions"}) {
    if (!p.contains(key)) throw ParseError(path + ": missing primal field " + key);
  }
  if (!d.contains("beta") || !d.contains("lambda_vectors")) {
    throw ParseError(path + ": missing dual field");
  }

  SolutionBundle out;
  for (const auto& row : p["beamformers"]) {
    out.primal.beamformers.push_back(cvec_from_json(row, "beamformers"));
  }
  out.primal.Q = cmat_from_json(p["Q"], "Q");
  out.primal.powers = vec_from_json(p["powers"], "powers");
  for (const auto& row : p["directions"]) {
    out.primal.directions.push_back(cvec_from_json(row, "directions"));
  }
  out.dual.beta = vec_from_json(d["beta"], "beta");
  for (const auto& row : d["lambda_vectors"]) {
    CVec v = cvec_from_json(row, "lambda_vectors");
    out.dual.lambdas.push_back(v * v.adjoint());
    out.dual.lambda_vectors.push_back(std::move(v));
  }
  return out;
}

void save_solution(const SolutionBundle& bundle, const std::string& path) {
  json j;
  json p;
  json beams = json::array();
  for (const auto& v : bundle.primal.beamformers) beams.push_back(cvec_to_json(v));
  p["beamformers"] = std::move(beams);
  p["Q"] = cmat_to_json(bundle.primal.Q);
  p["powers"] = vec_to_json(bundle.primal.powers);
  json dirs = json::array();
  for (const auto& v : bundle.primal.directions) dirs.push_back(cvec_to_json(v));
  p["directions"] = std::move(dirs);
  j["primal"] = std::move(p);

  json d;
  d["beta"] = vec_to_json(bundle.dual.beta);
  json lams = json::array();
  for (const auto& v : bundle.dual.lambda_vectors) lams.push_back(cvec_to_json(v));
  d["lambda_vectors"] = std::move(lams);
  j["dual"] = std::move(d);
  write_text_file(path, j.dump(2) + "\n");
}

void save_report(const SolveReport& report, const std::string& path) {
  json j;
  j["status"] = to_string(report.status);
  j["dual_iters"] = report.dual_iters;
  j["primal_iters"] = report.primal_iters;
  j["dual_objective"] = report.dual_objective;
  j["primal_objective"] = report.primal_objective;
  j["duality_gap_rel"] = report.duality_gap_rel;
  j["kkt_residuals"] = report.kkt_residuals;
  j["rate_bound"] = report.rate_bound;
  j["rate_practical"] = report.rate_practical;
  j["rho_probed"] = report.rho_probed;
  j["rho_closed_form"] = report.rho_closed_form;
  j["dual_trace"] = report.dual_trace;
  j["primal_trace"] = report.primal_trace;
  j["wall_time"] = report.wall_time;
  write_text_file(path, j.dump(2) + "\n");
}

void save_trace_csv(const std::vector<double>& objective,
                    const std::vector<double>& step,
                    const std::string& objective_column,
                    const std::string& path) {
  if (objective.size() != step.size()) {
    throw DomainError("trace columns disagree in length");
  }
  std::ostringstream os;
  os << "iteration," << objective_column << ",step_norm\n";
  char buf[64];
  for (size_t i = 0; i < objective.size(); ++i) {
    os << i;
    std::snprintf(buf, sizeof(buf), ",%.17g", objective[i]);
    os << buf;
    std::snprintf(buf, sizeof(buf), ",%.17g", step[i]);
    os << buf << "\n";
  }
  write_text_file(path, os.str());
}

}  // namespace jbc
