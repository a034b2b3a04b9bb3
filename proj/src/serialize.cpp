#include "hilbertctl/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

namespace {

using Variant = OperatorExpr::Variant;

json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double get_number(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number()) {
    throw ParseError(std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

int get_int(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw ParseError(std::string("field '") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

std::string get_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ParseError(std::string("field '") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

Space resolve_space(const json& j, const SpaceMap& names) {
  if (j.is_string()) {
    const auto it = names.find(j.get<std::string>());
    if (it == names.end()) {
      throw ParseError("unknown space '" + j.get<std::string>() + "'");
    }
    return it->second;
  }
  if (j.is_object()) return space_from_json(j);
  throw ParseError("space must be a name or an object");
}

Space space_field(const json& j, const char* key, const SpaceMap& names) {
  if (!j.contains(key)) {
    throw ParseError(std::string("operator is missing '") + key + "'");
  }
  return resolve_space(j.at(key), names);
}

json space_ref(const Space& s, const SpaceMap& names) {
  for (const auto& [name, sp] : names) {
    if (sp == s) return name;
  }
  return space_to_json(s);
}

std::vector<OperatorExpr> family_from_json(const json& j, int horizon,
                                           const SpaceMap& names,
                                           const std::string& what) {
  std::vector<OperatorExpr> fam;
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != horizon + 1) {
      throw ParseError(what + ": expected " + std::to_string(horizon + 1) +
                       " operators, got " + std::to_string(j.size()));
    }
    for (const auto& e : j) fam.push_back(operator_from_json(e, names));
  } else if (j.is_object()) {
    const OperatorExpr op = operator_from_json(j, names);
    fam.assign(horizon + 1, op);
  } else {
    throw ParseError(what + ": expected an operator or a list of operators");
  }
  return fam;
}

std::vector<OperatorExpr> family_field(const json& ops, const char* key,
                                       int horizon, const SpaceMap& names,
                                       const Space& dom, const Space& cod,
                                       bool optional) {
  if (!ops.contains(key)) {
    if (!optional) {
      throw ParseError(std::string("missing operator '") + key + "'");
    }
    return std::vector<OperatorExpr>(horizon + 1, OperatorExpr::zero(dom, cod));
  }
  auto fam = family_from_json(ops.at(key), horizon, names, key);
  for (std::size_t k = 0; k < fam.size(); ++k) {
    if (fam[k].domain() != dom || fam[k].codomain() != cod) {
      throw ParseError(std::string("operator '") + key + "' at k=" +
                       std::to_string(k) + " maps " +
                       fam[k].domain().describe() + " -> " +
                       fam[k].codomain().describe() + ", expected " +
                       dom.describe() + " -> " + cod.describe());
    }
  }
  return fam;
}

json family_to_json(const std::vector<OperatorExpr>& fam,
                    const SpaceMap& names) {
  json arr = json::array();
  for (const auto& op : fam) arr.push_back(operator_to_json(op, names));
  bool constant = !arr.empty();
  for (const auto& e : arr) constant = constant && e == arr.front();
  if (constant) return arr.front();
  return arr;
}

Space required_space(const SpaceMap& spaces, const char* name) {
  const auto it = spaces.find(name);
  if (it == spaces.end()) {
    throw ParseError(std::string("system needs a space named '") + name + "'");
  }
  return it->second;
}

json matrices_to_json(const std::vector<Eigen::MatrixXd>& ms) {
  json arr = json::array();
  for (const auto& m : ms) {
    if (m.size() == 0) {
      arr.push_back(nullptr);
    } else {
      arr.push_back(matrix_to_json(m));
    }
  }
  return arr;
}

json certs_to_json(const std::vector<SelfAdjointCert>& cs,
                   const std::vector<bool>* valid = nullptr) {
  json arr = json::array();
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (valid && !(*valid)[k]) {
      arr.push_back(nullptr);
    } else {
      arr.push_back(to_json(cs[k]));
    }
  }
  return arr;
}

template <class Fn>
auto wrap_json_errors(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

json space_to_json(const Space& s) {
  json j;
  j["kind"] = to_string(s.kind());
  switch (s.kind()) {
    case SpaceKind::kL2Line:
      j["half_width"] = s.half_width();
      j["spacing"] = s.spacing();
      break;
    case SpaceKind::kL2Interval:
      j["length"] = s.length();
      j["modes"] = s.dim();
      break;
    default:
      j["dim"] = s.dim();
  }
  return j;
}

Space space_from_json(const json& j) {
  return wrap_json_errors([&] {
    if (!j.is_object()) throw ParseError("space must be an object");
    const SpaceKind kind = space_kind_from_string(get_string(j, "kind"));
    try {
      switch (kind) {
        case SpaceKind::kEll2:
          return Space::ell2(get_int(j, "dim"));
        case SpaceKind::kEuclidean:
          return Space::euclidean(get_int(j, "dim"));
        case SpaceKind::kL2Line:
          return Space::l2_line(get_number(j, "half_width"),
                                get_number(j, "spacing"));
        case SpaceKind::kL2Interval:
          return Space::l2_interval(get_number(j, "length"),
                                    get_int(j, "modes"));
      }
    } catch (const DimensionError& e) {
      throw ParseError(e.what());
    }
    throw ParseError("unknown space kind");
  });
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(num(m(i, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ParseError("matrix must be a non-empty array of rows");
  }
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ParseError("matrix rows must have equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) throw ParseError("matrix entry not a number");
      m(i, c) = j[i][c].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(num(v(i)));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("vector must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("vector entry not a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

json operator_to_json(const OperatorExpr& op, const SpaceMap& names) {
  json j;
  j["variant"] = op.variant_name();
  switch (op.variant()) {
    case Variant::kIdentity:
      j["space"] = space_ref(op.domain(), names);
      break;
    case Variant::kZero:
    case Variant::kRightShift:
    case Variant::kLeftShift:
    case Variant::kFilling:
    case Variant::kProjection:
      j["domain"] = space_ref(op.domain(), names);
      j["codomain"] = space_ref(op.codomain(), names);
      break;
    case Variant::kScaled:
      j["c"] = op.scale();
      j["inner"] = operator_to_json(op.operands()[0], names);
      break;
    case Variant::kDense:
      j["domain"] = space_ref(op.domain(), names);
      j["codomain"] = space_ref(op.codomain(), names);
      j["data"] = matrix_to_json(op.dense_matrix());
      break;
    case Variant::kDiagonal:
      j["space"] = space_ref(op.domain(), names);
      j["entries"] = vector_to_json(op.diagonal_entries());
      break;
    case Variant::kGaussianConvolution:
      j["space"] = space_ref(op.domain(), names);
      j["width"] = op.width();
      break;
    case Variant::kHeatSemigroup:
      j["space"] = space_ref(op.domain(), names);
      j["alpha"] = op.alpha();
      j["tau"] = op.tau();
      break;
    case Variant::kSum: {
      json terms = json::array();
      for (const auto& t : op.operands()) {
        terms.push_back(operator_to_json(t, names));
      }
      j["terms"] = std::move(terms);
      break;
    }
    case Variant::kCompose: {
      json factors = json::array();
      for (const auto& f : op.operands()) {
        factors.push_back(operator_to_json(f, names));
      }
      j["factors"] = std::move(factors);
      break;
    }
    case Variant::kAdjoint:
      j["inner"] = operator_to_json(op.operands()[0], names);
      break;
  }
  return j;
}

OperatorExpr operator_from_json(const json& j, const SpaceMap& names) {
  return wrap_json_errors([&]() -> OperatorExpr {
    if (!j.is_object()) throw ParseError("operator must be an object");
    const std::string v = get_string(j, "variant");
    try {
      if (v == "identity") {
        return OperatorExpr::identity(space_field(j, "space", names));
      }
      if (v == "zero") {
        return OperatorExpr::zero(space_field(j, "domain", names),
                                  space_field(j, "codomain", names));
      }
      if (v == "scaled") {
        if (!j.contains("inner")) throw ParseError("scaled needs 'inner'");
        return OperatorExpr::scaled(get_number(j, "c"),
                                    operator_from_json(j.at("inner"), names));
      }
      if (v == "dense") {
        if (!j.contains("data")) throw ParseError("dense needs 'data'");
        return OperatorExpr::dense(space_field(j, "domain", names),
                                   space_field(j, "codomain", names),
                                   matrix_from_json(j.at("data")));
      }
      if (v == "diagonal") {
        if (!j.contains("entries")) throw ParseError("diagonal needs entries");
        return OperatorExpr::diagonal(space_field(j, "space", names),
                                      vector_from_json(j.at("entries")));
      }
      if (v == "right_shift") {
        return OperatorExpr::right_shift(space_field(j, "domain", names),
                                         space_field(j, "codomain", names));
      }
      if (v == "left_shift") {
        return OperatorExpr::left_shift(space_field(j, "domain", names),
                                        space_field(j, "codomain", names));
      }
      if (v == "filling") {
        return OperatorExpr::filling(space_field(j, "domain", names),
                                     space_field(j, "codomain", names));
      }
      if (v == "projection") {
        return OperatorExpr::projection(space_field(j, "domain", names),
                                        space_field(j, "codomain", names));
      }
      if (v == "gaussian_convolution") {
        return OperatorExpr::gaussian_convolution(
            space_field(j, "space", names), get_number(j, "width"));
      }
      if (v == "heat_semigroup") {
        return OperatorExpr::heat_semigroup(space_field(j, "space", names),
                                            get_number(j, "alpha"),
                                            get_number(j, "tau"));
      }
      if (v == "sum" || v == "compose") {
        const char* key = v == "sum" ? "terms" : "factors";
        if (!j.contains(key) || !j.at(key).is_array()) {
          throw ParseError(v + " needs an array '" + key + "'");
        }
        std::vector<OperatorExpr> parts;
        for (const auto& e : j.at(key)) {
          parts.push_back(operator_from_json(e, names));
        }
        return v == "sum" ? OperatorExpr::sum(std::move(parts))
                          : OperatorExpr::compose(std::move(parts));
      }
      if (v == "adjoint") {
        if (!j.contains("inner")) throw ParseError("adjoint needs 'inner'");
        return OperatorExpr::adjoint_of(
            operator_from_json(j.at("inner"), names));
      }
    } catch (const DimensionError& e) {
      throw ParseError(std::string("operator '") + v + "': " + e.what());
    }
    throw ParseError("unknown operator variant '" + v + "'");
  });
}

std::string to_string(SystemType t) {
  switch (t) {
    case SystemType::kControlled:
      return "controlled";
    case SystemType::kDisturbed:
      return "disturbed";
    case SystemType::kTwoInput:
      return "two_input";
  }
  return "unknown";
}

QuadraticCost parse_cost(const json& j, const ControlledSystem& sys,
                         const SpaceMap& spaces) {
  return wrap_json_errors([&] {
    if (!j.is_object()) throw ParseError("cost must be an object");
    QuadraticCost c;
    const int N = sys.horizon;
    c.M = family_field(j, "M", N, spaces, sys.H, sys.H, false);
    c.L = family_field(j, "L", N, spaces, sys.H, sys.U, true);
    c.R = family_field(j, "R", N, spaces, sys.U, sys.U, false);
    if (j.contains("S")) {
      c.S = operator_from_json(j.at("S"), spaces);
      if (c.S.domain() != sys.H || c.S.codomain() != sys.H) {
        throw ParseError("cost S must act on H");
      }
    } else {
      c.S = OperatorExpr::zero(sys.H, sys.H);
    }
    try {
      c.validate(sys);
    } catch (const NotSelfAdjointError& e) {
      throw ParseError(std::string("cost: ") + e.what());
    }
    return c;
  });
}

json cost_to_json(const QuadraticCost& cost, const SpaceMap& spaces) {
  json j;
  j["M"] = family_to_json(cost.M, spaces);
  j["L"] = family_to_json(cost.L, spaces);
  j["R"] = family_to_json(cost.R, spaces);
  j["S"] = operator_to_json(cost.S, spaces);
  return j;
}

Eigen::VectorXd parse_x0(const json& j, const Space& H,
                         std::vector<std::string>* warnings) {
  return wrap_json_errors([&]() -> Eigen::VectorXd {
    Eigen::VectorXd x;
    if (j.is_array()) {
      x = vector_from_json(j);
    } else if (j.is_object() && j.contains("coords")) {
      x = vector_from_json(j.at("coords"));
    } else if (j.is_object() && j.contains("geometric")) {
      const json& g = j.at("geometric");
      const double a = get_number(g, "first");
      const double r = get_number(g, "ratio");
      x.resize(H.dim());
      double p = a;
      for (int i = 0; i < H.dim(); ++i, p *= r) x(i) = p;
      if (std::abs(r) < 1.0) {
        const double tail = std::abs(p) / std::sqrt(1.0 - r * r);
        if (tail >= 1e-8 && warnings) {
          std::ostringstream os;
          os << "x0 tail beyond the truncation has norm " << tail
             << " (>= 1e-8); increase the dimension";
          warnings->push_back(os.str());
        }
      } else if (warnings) {
        warnings->push_back("x0 geometric ratio >= 1 is not in l2");
      }
    } else if (j.is_object() && j.contains("gaussian")) {
      if (H.kind() != SpaceKind::kL2Line) {
        throw ParseError("x0 'gaussian' needs an L2_line space");
      }
      const double s = get_number(j.at("gaussian"), "width");
      const Eigen::VectorXd t = H.grid();
      x = (-(t.array() * t.array()) / (2.0 * s * s)).exp().matrix();
    } else if (j.is_object() && j.contains("sine_mode")) {
      if (H.kind() != SpaceKind::kL2Interval) {
        throw ParseError("x0 'sine_mode' needs an L2_interval space");
      }
      const json& g = j.at("sine_mode");
      const int m = get_int(g, "mode");
      if (m < 1 || m > H.dim()) throw ParseError("x0 sine mode out of range");
      x = Eigen::VectorXd::Zero(H.dim());
      x(m - 1) = get_number(g, "amplitude") * std::sqrt(H.length() / 2.0);
    } else {
      throw ParseError("x0: unrecognised format");
    }
    if (x.size() != H.dim()) {
      throw ParseError("x0 has " + std::to_string(x.size()) +
                       " coordinates, expected " + std::to_string(H.dim()));
    }
    if (!x.allFinite()) throw ParseError("x0 must be finite");
    return x;
  });
}

SystemDoc parse_system(const json& j) {
  return wrap_json_errors([&] {
    if (!j.is_object()) throw ParseError("system file must be an object");
    SystemDoc doc;
    const std::string type = get_string(j, "type");
    if (!j.contains("spaces") || !j.at("spaces").is_object()) {
      throw ParseError("system needs a 'spaces' object");
    }
    for (const auto& [name, sj] : j.at("spaces").items()) {
      doc.spaces.emplace(name, space_from_json(sj));
    }
    const int N = get_int(j, "horizon");
    if (N < 0) throw ParseError("horizon must be >= 0");
    if (!j.contains("operators") || !j.at("operators").is_object()) {
      throw ParseError("system needs an 'operators' object");
    }
    const json& ops = j.at("operators");
    const SpaceMap& sp = doc.spaces;
    if (type == "controlled") {
      doc.type = SystemType::kControlled;
      ControlledSystem s;
      s.horizon = N;
      s.H = required_space(sp, "H");
      s.U = required_space(sp, "U");
      s.A = family_field(ops, "A", N, sp, s.H, s.H, false);
      s.B = family_field(ops, "B", N, sp, s.U, s.H, false);
      s.C = family_field(ops, "C", N, sp, s.H, s.H, true);
      s.D = family_field(ops, "D", N, sp, s.U, s.H, true);
      if (j.contains("cost")) doc.cost = parse_cost(j.at("cost"), s, sp);
      doc.controlled = std::move(s);
    } else if (type == "disturbed") {
      doc.type = SystemType::kDisturbed;
      DisturbedSystem s;
      s.horizon = N;
      s.H = required_space(sp, "H");
      s.V = required_space(sp, "V");
      s.Z = required_space(sp, "Z");
      s.A = family_field(ops, "A", N, sp, s.H, s.H, false);
      s.C = family_field(ops, "C", N, sp, s.H, s.H, true);
      s.B1 = family_field(ops, "B1", N, sp, s.V, s.H, false);
      s.D1 = family_field(ops, "D1", N, sp, s.V, s.H, true);
      s.Cbar = family_field(ops, "Cbar", N, sp, s.H, s.Z, false);
      s.Dbar = family_field(ops, "Dbar", N, sp, s.V, s.Z, true);
      s.check_assumption1();
      doc.disturbed = std::move(s);
    } else if (type == "two_input") {
      doc.type = SystemType::kTwoInput;
      TwoInputSystem s;
      s.horizon = N;
      s.H = required_space(sp, "H");
      s.U = required_space(sp, "U");
      s.V = required_space(sp, "V");
      s.Z = required_space(sp, "Z");
      s.A = family_field(ops, "A", N, sp, s.H, s.H, false);
      s.C = family_field(ops, "C", N, sp, s.H, s.H, true);
      s.B1 = family_field(ops, "B1", N, sp, s.V, s.H, false);
      s.D1 = family_field(ops, "D1", N, sp, s.V, s.H, true);
      s.B2 = family_field(ops, "B2", N, sp, s.U, s.H, false);
      s.D2 = family_field(ops, "D2", N, sp, s.U, s.H, true);
      s.Cbar = family_field(ops, "Cbar", N, sp, s.H, s.Z, false);
      s.Gbar = family_field(ops, "Gbar", N, sp, s.U, s.Z, false);
      s.check_assumption2();
      doc.two_input = std::move(s);
    } else {
      throw ParseError("unknown system type '" + type + "'");
    }
    if (j.contains("x0")) {
      doc.x0 = parse_x0(j.at("x0"), required_space(sp, "H"), &doc.warnings);
    }
    return doc;
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

SystemDoc parse_system_file(const std::string& path) {
  try {
    return parse_system(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

json system_to_json(const SystemDoc& doc) {
  json j;
  j["type"] = to_string(doc.type);
  json spaces = json::object();
  for (const auto& [name, s] : doc.spaces) spaces[name] = space_to_json(s);
  j["spaces"] = spaces;
  json ops = json::object();
  const SpaceMap& sp = doc.spaces;
  switch (doc.type) {
    case SystemType::kControlled: {
      const auto& s = doc.controlled.value();
      j["horizon"] = s.horizon;
      ops["A"] = family_to_json(s.A, sp);
      ops["B"] = family_to_json(s.B, sp);
      ops["C"] = family_to_json(s.C, sp);
      ops["D"] = family_to_json(s.D, sp);
      break;
    }
    case SystemType::kDisturbed: {
      const auto& s = doc.disturbed.value();
      j["horizon"] = s.horizon;
      ops["A"] = family_to_json(s.A, sp);
      ops["C"] = family_to_json(s.C, sp);
      ops["B1"] = family_to_json(s.B1, sp);
      ops["D1"] = family_to_json(s.D1, sp);
      ops["Cbar"] = family_to_json(s.Cbar, sp);
      ops["Dbar"] = family_to_json(s.Dbar, sp);
      break;
    }
    case SystemType::kTwoInput: {
      const auto& s = doc.two_input.value();
      j["horizon"] = s.horizon;
      ops["A"] = family_to_json(s.A, sp);
      ops["C"] = family_to_json(s.C, sp);
      ops["B1"] = family_to_json(s.B1, sp);
      ops["D1"] = family_to_json(s.D1, sp);
      ops["B2"] = family_to_json(s.B2, sp);
      ops["D2"] = family_to_json(s.D2, sp);
      ops["Cbar"] = family_to_json(s.Cbar, sp);
      ops["Gbar"] = family_to_json(s.Gbar, sp);
      break;
    }
  }
  j["operators"] = ops;
  if (doc.cost) j["cost"] = cost_to_json(*doc.cost, sp);
  if (doc.x0) j["x0"] = json{{"coords", vector_to_json(*doc.x0)}};
  return j;
}

json to_json(const SelfAdjointCert& c) {
  return json{{"min_eig", num(c.min_eig)},
              {"max_eig", num(c.max_eig)},
              {"cond", num(c.cond)},
              {"tol", num(c.tol)},
              {"symmetry_residual", num(c.symmetry_residual)}};
}

json to_json(const RiccatiSolution& sol) {
  json j;
  j["status"] = to_string(sol.status);
  j["failed_step"] = sol.failed_step;
  j["message"] = sol.message;
  j["min_R_eig"] = num(sol.min_R_eig);
  j["worst_R_step"] = sol.worst_R_step;
  j["P"] = matrices_to_json(sol.P);
  j["R"] = matrices_to_json(sol.R);
  j["G"] = matrices_to_json(sol.G);
  j["K"] = matrices_to_json(sol.K);
  std::vector<bool> valid(sol.R_cert.size());
  for (std::size_t k = 0; k < valid.size(); ++k) {
    valid[k] = static_cast<int>(k) > sol.failed_step;
  }
  j["R_cert"] = certs_to_json(sol.R_cert, &valid);
  j["kappa_note"] =
      "bounded-inverse test on the truncation uses cond(R(k)) <= kappa_max";
  return j;
}

json to_json(const LQSolution& sol) {
  json j;
  j["optimal_value"] = num(sol.optimal_value);
  j["well_posed"] = sol.well_posed;
  j["gains"] = matrices_to_json(sol.gains);
  j["riccati"] = to_json(sol.riccati);
  return j;
}

json to_json(const BRLRun& run, bool include_operators) {
  json j;
  j["gamma"] = run.gamma;
  j["feasible"] = run.feasible;
  j["failing_step"] = run.failing_step;
  j["last_step"] = run.last_step;
  j["min_pi3_eig"] = num(run.min_pi3_eig);
  json mins = json::array();
  for (std::size_t k = 0; k < run.pi3.size(); ++k) {
    mins.push_back(run.computed[k] ? num(run.pi3[k].min_eig) : json(nullptr));
  }
  j["pi3_min_eig"] = mins;
  j["message"] = run.message;
  if (include_operators) {
    j["Y"] = matrices_to_json(run.Y);
    j["F"] = matrices_to_json(run.F);
  }
  return j;
}

json to_json(const NormResult& r) {
  return json{{"norm", r.norm},
              {"iterations", r.iterations},
              {"bracket", json::array({r.lo, r.hi})},
              {"bracket_source", r.bracket_source}};
}

json to_json(const CoupledSolution& sol) {
  json j;
  j["status"] = to_string(sol.status);
  j["failed_step"] = sol.failed_step;
  j["message"] = sol.message;
  if (sol.solved()) {
    j["J1"] = sol.J1;
    j["J2"] = sol.J2;
  }
  j["P1"] = matrices_to_json(sol.P1);
  j["P2"] = matrices_to_json(sol.P2);
  j["K1"] = matrices_to_json(sol.K1);
  j["K2"] = matrices_to_json(sol.K2);
  std::vector<bool> valid(sol.R1_cert.size());
  for (std::size_t k = 0; k < valid.size(); ++k) {
    valid[k] = static_cast<int>(k) > sol.failed_step;
  }
  j["R1_cert"] = certs_to_json(sol.R1_cert, &valid);
  j["R2_cert"] = certs_to_json(sol.R2_cert, &valid);
  return j;
}

json to_json(const HinfDesign& d) {
  json j;
  j["gamma"] = d.gamma;
  j["P"] = matrices_to_json(d.P);
  j["u_gains"] = matrices_to_json(d.Ku);
  j["v_gains"] = matrices_to_json(d.Kv);
  j["R1_cert"] = certs_to_json(d.R1_cert);
  j["R2_cert"] = certs_to_json(d.R2_cert);
  return j;
}

json to_json(const H2HinfDesign& d) {
  json j;
  j["coupled"] = to_json(d.coupled);
  if (d.coupled.solved()) {
    j["J2"] = d.J2;
    j["closed_loop_brl"] = to_json(d.closed_loop_brl);
    j["attenuation_verified"] = d.attenuation_verified;
  }
  if (!d.diagnostic.empty()) j["diagnostic"] = d.diagnostic;
  return j;
}

json to_json(const NashReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back(json{{"player", s.player},
                           {"value", s.value},
                           {"margin", s.margin}});
  }
  return json{{"J1_enumerated", r.J1},
              {"J2_enumerated", r.J2},
              {"J1_riccati", r.J1_riccati},
              {"J2_riccati", r.J2_riccati},
              {"worst_margin", r.worst_margin},
              {"deviations_per_player", r.deviations},
              {"samples", samples}};
}

json to_json(const Theorem2Certificate& c) {
  return json{{"S_nonnegative", c.S_nonnegative},
              {"R_positive", c.R_positive},
              {"Psi_nonnegative", c.Psi_nonnegative},
              {"min_eig_S", num(c.min_eig_S)},
              {"min_eig_R", num(c.min_eig_R)},
              {"min_eig_Psi", num(c.min_eig_Psi)},
              {"worst_R_step", c.worst_R_step},
              {"worst_Psi_step", c.worst_Psi_step}};
}

std::string states_csv(const std::vector<Eigen::VectorXd>& x) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "k,coordinate,value\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (int i = 0; i < x[k].size(); ++i) {
      os << k << ',' << i << ',' << x[k](i) << '\n';
    }
  }
  return os.str();
}

}  // namespace hilbertctl
