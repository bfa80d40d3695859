#pragma once

#include <json.hpp>

#include "nttkit/tt.hpp"

namespace nttkit {

// {shape, ranks, cores: [[[re, im], ...] per core], orth}
// Core entries are listed in left-unfolding order (a fastest, then i, then b).
nlohmann::json to_json(const TTTensor& x);
TTTensor tt_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DenseTensor& a);
DenseTensor dense_from_json(const nlohmann::json& j);

} // namespace nttkit
