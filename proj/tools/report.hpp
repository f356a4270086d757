#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsallis/entropy.hpp"
#include "tsallis/pricing.hpp"

namespace tsallis::app {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form, so identical doubles print identically.
std::string num(double v);

Json to_json(const Quote& q);
Json to_json(const Check& c);
Json to_json(const DualRecord& d);
Json to_json(const PriceReport& r);
Json to_json(const SweepReport& r);
Json to_json(const BoundsReport& r);
Json to_json(const EntropyEstimate& e);
Json to_json(const std::vector<Check>& checks);
Json setup_json(const PricingSetup& s);

// gamma,F0,CE0,riskneutral0
void write_sweep_csv(std::ostream& os, const SweepReport& r);
// quantity,value,stderr,scheme_tol,scheme
void write_price_csv(std::ostream& os, const PriceReport& r);
// problem,candidate,optimizer,value,stderr,reference,gap,allowance,pass
void write_dual_csv(std::ostream& os, const std::vector<DualRecord>& duals);
// name,relation,lhs,rhs,tol,pass
void write_check_csv(std::ostream& os, const std::vector<Check>& checks);

}  // namespace tsallis::app
