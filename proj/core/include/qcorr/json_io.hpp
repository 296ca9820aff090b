#pragma once

#include <string>

#include <json.hpp>

#include "qcorr/channel.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

using Json = nlohmann::ordered_json;

/// State JSON: {"layout": [["A1",2],["A2",2]], "re": [[...]], "im": [[...]]},
/// row-major; dimensions validated on load.
Json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const Json& j,
                              const ToleranceProfile& tol = ToleranceProfile::standard());

Json layout_to_json(const SystemLayout& layout);
SystemLayout layout_from_json(const Json& j);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// Channel JSON: {"in_layout": ..., "out_layout": ..., "kraus": [matrix, ...]}.
Json channel_to_json(const Channel& ch);
Channel channel_from_json(const Json& j);

void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

DensityMatrix load_state_json(const std::string& path);
void save_state_json(const DensityMatrix& rho, const std::string& path);

}  // namespace qcorr
