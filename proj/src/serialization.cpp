#include "qwalk/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qwalk/errors.hpp"

namespace qwalk {

using nlohmann::json;

namespace {

json complex_pair(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("complex entry must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json matrix_to_json(const CMatrix& m, const std::string& key) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(complex_pair(m(i, j)));
  }
  return json{{"n", m.rows()}, {key, std::move(entries)}};
}

CMatrix matrix_from_json(const json& doc, const std::string& key) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains(key)) {
    throw ParseError("matrix document needs fields \"n\" and \"" + key + "\"");
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<long>() < 1) {
    throw ParseError("\"n\" must be a positive integer");
  }
  const int n = doc["n"].get<int>();
  const json& entries = doc[key];
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(n) * n) {
    throw ParseError("\"" + key + "\" must hold n*n = " + std::to_string(n * n) + " entries");
  }
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = complex_from(entries[i * n + j]);
  }
  return m;
}

json walk_state_to_json(const WalkState& s) { return matrix_to_json(s.amplitudes(), "amp"); }

WalkState walk_state_from_json(const json& doc) { return WalkState(matrix_from_json(doc, "amp")); }

json unitary_to_json(const CMatrix& u) { return matrix_to_json(u, "entries"); }

CMatrix unitary_from_json(const json& doc) { return matrix_from_json(doc, "entries"); }

json stage_sequence_to_json(const StageSequence& seq) {
  json stages = json::array();
  for (const auto& st : seq.stages) {
    json pairs = json::array();
    for (const auto& rot : st.rotations) {
      pairs.push_back({{"a", rot.a},
                       {"b", rot.b},
                       {"u",
                        {complex_pair(rot.u(0, 0)), complex_pair(rot.u(0, 1)),
                         complex_pair(rot.u(1, 0)), complex_pair(rot.u(1, 1))}}});
    }
    stages.push_back({{"d", st.d}, {"pairs", std::move(pairs)}});
  }
  return json{{"n", seq.n}, {"stages", std::move(stages)}};
}

StageSequence stage_sequence_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("stages")) {
    throw ParseError("stage sequence needs fields \"n\" and \"stages\"");
  }
  StageSequence seq;
  try {
    seq.n = doc["n"].get<int>();
    for (const auto& js : doc.at("stages")) {
      Stage st;
      st.d = js.at("d").get<int>();
      for (const auto& jp : js.at("pairs")) {
        PairRotation rot;
        rot.a = jp.at("a").get<int>();
        rot.b = jp.at("b").get<int>();
        const json& u = jp.at("u");
        if (!u.is_array() || u.size() != 4) throw ParseError("pair \"u\" must hold 4 entries");
        rot.u << complex_from(u[0]), complex_from(u[1]), complex_from(u[2]), complex_from(u[3]);
        st.rotations.push_back(rot);
      }
      // Values round-trip exactly; the looser tolerance admits hand-edited files.
      validate_stage(st, seq.n, 1e-10);
      seq.stages.push_back(std::move(st));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed stage sequence: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid stage: ") + e.what());
  }
  return seq;
}

std::string distribution_tsv(const Distribution& d) {
  std::ostringstream os;
  os << "# node\tprobability\n";
  char buf[64];
  for (std::size_t i = 0; i < d.p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\n", i + 1, d.p[i]);
    os << buf;
  }
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qwalk
