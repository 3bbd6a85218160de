#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdtl {

struct EpochReport;
struct SweepReport;

// 6 significant digits ("%.6g"); the fixed float format for every CSV.
std::string format_g6(double v);

// Header: epoch,mean_ce,mean_sd,mean_total,train_acc1,test_acc1,test_acc5,drift
void write_epoch_csv(std::ostream& out, const std::vector<EpochReport>& reports);

// Header: lambda,seed,acc1,acc5,drift,mean_ce,mean_sd,mean_total
void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace sdtl
