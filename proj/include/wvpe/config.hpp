#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wvpe/simulator.hpp"

namespace wvpe {

inline constexpr int config_schema_version = 1;

/// Named source conditions: led808, znse, filtered.
void apply_preset(SetupConfig& config, std::string_view name);

/// Named dispersion elements: none, znse_1mm.
std::optional<SlabSpec> named_dispersion(std::string_view name);

/// Overlay a schema-version-1 config document onto `config`. Unknown keys and type
/// mismatches throw InvalidConfiguration naming the offending field path. When the
/// document does not set the HWP design wavelength, it follows the source centre.
void apply_config_json(SetupConfig& config, const nlohmann::json& doc, bool& design_wavelength_set);

/// Full resolved configuration; feeding it back through apply_config_json reproduces
/// `config` exactly.
nlohmann::ordered_json to_json(const SetupConfig& config);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace wvpe
