// JSON emitters for experiment reports. Hand-rolled so floating-point
// fields serialize with 17 significant digits.

#ifndef QKD_REPORTS_HPP
#define QKD_REPORTS_HPP

#include <string>

#include "qkd/algoinfo.hpp"
#include "qkd/analysis.hpp"
#include "qkd/lincode.hpp"
#include "qkd/qsim.hpp"
#include "qkd/synthetic.hpp"

namespace qkd {

std::string format_double17(double v);

std::string report_json(const SecurityBoundReport& r, const std::string& manifest_id = "");
std::string report_json(const SamplingTailReport& r, const std::string& manifest_id = "");
std::string report_json(const OtpExperimentReport& r, const std::string& manifest_id = "");
std::string report_json(const PerturbationSweepReport& r, const std::string& manifest_id = "");
std::string report_json(const ListingSweepReport& r, const std::string& manifest_id = "");
std::string report_json(const CharacterSumSweepReport& r, const std::string& manifest_id = "");

} // namespace qkd

#endif
