#pragma once

// Serialization of results: JSON documents for the CLI and CSV tables for
// sweeps and plots. Every number is written in round-trip form.

#include <iosfwd>
#include <string>
#include <string_view>

#include "mvac/evolution.hpp"
#include "mvac/io.hpp"
#include "mvac/martingale.hpp"
#include "mvac/sde.hpp"
#include "mvac/vacuum.hpp"

namespace mvac {

std::string to_json(const VacuumSolution& s);
std::string to_json(const MartingaleReport& r);
std::string to_json(const ConstraintRoot& r);
std::string to_json(const ConsistencyReport& r);
std::string to_json(const RegimeReport& r);
std::string to_json(const McMartingaleResult& r);
std::string to_json(const FlowReport& r);

/// {"error": kind, "message": ...}
std::string error_json(std::string_view kind, std::string_view message);

/// residual_max, residual_l2, h, tolerance, rows_checked, verdict.
KeyValueRecord to_record(const MartingaleReport& r);

/// One root per row: regime,n,m,phi_x,phi_y,degeneracy,approximate. Arbitrary
/// fields are written as "arbitrary"; inapplicable ones are left empty.
void write_csv(std::ostream& out, const VacuumSolution& s);

/// t,mass,norm
void write_csv(std::ostream& out, const FlowReport& r);

/// x,S,value for a 1-D curve (S = e^x).
void write_curve_csv(std::ostream& out, const StateVector& curve);

}  // namespace mvac
