#pragma once

#include <iosfwd>

#include "options.hpp"

namespace mlyap::cli {

int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_exponent(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_dt(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_region(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const Options& opts, std::ostream& out, std::ostream& err);

} // namespace mlyap::cli
