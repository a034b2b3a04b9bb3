#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "hilbertctl/game.hpp"
#include "hilbertctl/hinf.hpp"
#include "hilbertctl/lq.hpp"
#include "hilbertctl/riccati.hpp"

namespace hilbertctl {

using json = nlohmann::json;
using SpaceMap = std::map<std::string, Space>;

json space_to_json(const Space& s);
Space space_from_json(const json& j);

/// Spaces found in `names` are written by name, others inline.
json operator_to_json(const OperatorExpr& op, const SpaceMap& names);
OperatorExpr operator_from_json(const json& j, const SpaceMap& names);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

enum class SystemType { kControlled, kDisturbed, kTwoInput };
std::string to_string(SystemType t);

/// A parsed system file. Exactly one of the system members is set,
/// according to `type`.
struct SystemDoc {
  SystemType type = SystemType::kControlled;
  SpaceMap spaces;
  std::optional<ControlledSystem> controlled;
  std::optional<DisturbedSystem> disturbed;
  std::optional<TwoInputSystem> two_input;
  std::optional<QuadraticCost> cost;
  std::optional<Eigen::VectorXd> x0;
  std::vector<std::string> warnings;
};

/// Throws ParseError on schema violations and AssumptionError when the
/// structural assumption of the system type fails.
SystemDoc parse_system(const json& j);
SystemDoc parse_system_file(const std::string& path);
json system_to_json(const SystemDoc& doc);

QuadraticCost parse_cost(const json& j, const ControlledSystem& sys,
                         const SpaceMap& spaces);
json cost_to_json(const QuadraticCost& cost, const SpaceMap& spaces);

/// Accepts a bare coordinate array, {"coords": [...]},
/// {"geometric": {"first": a, "ratio": r}}, {"gaussian": {"width": s}} on an
/// L2_line space, or {"sine_mode": {"mode": m, "amplitude": c}} on an
/// L2_interval space. Warns when a truncated geometric tail exceeds 1e-8.
Eigen::VectorXd parse_x0(const json& j, const Space& H,
                         std::vector<std::string>* warnings = nullptr);

json read_json_file(const std::string& path);

json to_json(const SelfAdjointCert& c);
json to_json(const RiccatiSolution& sol);
json to_json(const LQSolution& sol);
json to_json(const BRLRun& run, bool include_operators = false);
json to_json(const NormResult& r);
json to_json(const CoupledSolution& sol);
json to_json(const HinfDesign& d);
json to_json(const H2HinfDesign& d);
json to_json(const NashReport& r);
json to_json(const Theorem2Certificate& c);

/// Long-format CSV (k, coordinate, value) with header.
std::string states_csv(const std::vector<Eigen::VectorXd>& x);

}  // namespace hilbertctl
