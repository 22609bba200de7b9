#ifndef MACOV_JSON_IO_HPP
#define MACOV_JSON_IO_HPP

#include <iosfwd>
#include <string>

#include "macov/estimate.hpp"
#include "macov/identify.hpp"
#include "macov/lattice.hpp"

namespace macov {

// {"q": [...], "a": [...]} (row-major)
std::string coef_to_json(const CoefGrid& a);
CoefGrid coef_from_json(const std::string& text);

// {"q": [...], "gamma": [...], "lags": [[...], ...]} (canonical half-lag order)
std::string acov_to_json(const AcovTable& g, bool with_lags = true);
AcovTable acov_from_json(const std::string& text);

// {"points": [CoefGrid...], "real": [...], "invertible_index": int|null}
// Complex points are emitted as {"q":..., "a_re":..., "a_im":...}.
std::string fiber_to_json(const Fiber& f, int invertible_index);

// {"critical_points": [...], "real_indices": [...], "selected": {...},
//  "objective": ..., "path_stats": {...}}
std::string report_to_json(const CriticalReport& rep, const Order& order);

// Reads a whole stream/file into a string; throws on failure.
std::string slurp(std::istream& is);
std::string slurp_file(const std::string& path);
void spit_file(const std::string& path, const std::string& text);

// Number formatting shared by all writers: shortest 17-significant-digit
// form, so identical values always print identically.
std::string json_num(double x);

}  // namespace macov

#endif
