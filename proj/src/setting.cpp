#include "mfm/setting.hpp"

namespace mfm {

std::string MfmSetting::setting_id() const {
  std::string id = prior_k.id_token() + "_" + to_string(schedule.kind) + "_" +
                   (schedule.kind == MfmKind::static_mfm ? "g" : "a") +
                   format_number(schedule.value) + "_B" + format_number(B0) + "_C" +
                   format_number(C0);
  if (b0.has_value()) id += "_b" + format_number(*b0);
  if (c0 != 2.0) id += "_c" + format_number(c0);
  return id;
}

ComponentPriors resolve_component_priors(const MfmSetting& setting, const Dataset& data) {
  if (!(setting.B0 > 0.0) || !(setting.C0 > 0.0) || !(setting.c0 > 0.0))
    throw ConfigError("component priors: B0, c0, C0 must be > 0");
  return {setting.b0.value_or(data.midpoint()), setting.B0, setting.c0, setting.C0};
}

}  // namespace mfm
