#ifndef QIF_IO_HPP
#define QIF_IO_HPP

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "qif/channel.hpp"
#include "qif/games.hpp"
#include "qif/pwdcheck.hpp"
#include "qif/vulnerability.hpp"

namespace qif::io {

using Json = nlohmann::ordered_json;

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

Json to_json(const LabeledMatrixd& m);
LabeledMatrixd matrix_from_json(const Json& j);

Json to_json(const Channeld& c);
Channeld channel_from_json(const Json& j);

/// {"weights": {label: w}}; weights are renormalized on load.
Json to_json(const Priord& pi);
Priord prior_from_json(const Json& j);
Json to_json(const IndexDistributiond& mu);
IndexDistributiond index_distribution_from_json(const Json& j);

/// {"kind": "bayes"} or {"kind": "gain", "guesses", "secrets"?, "gain"}.
/// `secrets` supplies the gain columns when the file omits them.
Json to_json(const VulnMeasured& v);
VulnMeasured measure_from_json(const Json& j, const std::optional<Labels>& secrets = std::nullopt);

/// {"defender", "attacker", "prior", "measure", "channels": {"d|a": channel}}
Json to_json(const LeakageGame& g);
LeakageGame game_from_json(const Json& j);

/// Plain {label: weight} object.
Json weights_to_json(const ActionDistribution& d);
Json to_json(const GameSolution& s);
Json to_json(const HierarchyReport& r);
Json to_json(const pwd::UniformEquilibriumReport& r);

}  // namespace qif::io

#endif  // QIF_IO_HPP
