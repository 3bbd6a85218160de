#include "sdtl/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sdtl/sweep.hpp"
#include "sdtl/trainer.hpp"

namespace sdtl {

std::string format_g6(double v) {
  // Pin the non-finite spellings so output bytes do not depend on how the
  // platform's printf renders them; a NaN's sign bit in particular is noise.
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_epoch_csv(std::ostream& out, const std::vector<EpochReport>& reports) {
  out << "epoch,mean_ce,mean_sd,mean_total,train_acc1,test_acc1,test_acc5,drift\n";
  for (const EpochReport& r : reports) {
    out << r.epoch << ',' << format_g6(r.mean_ce) << ',' << format_g6(r.mean_sd) << ','
        << format_g6(r.mean_total) << ',' << format_g6(r.train_acc1) << ','
        << format_g6(r.test_acc1) << ',' << format_g6(r.test_acc5) << ','
        << format_g6(r.drift) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "lambda,seed,acc1,acc5,drift,mean_ce,mean_sd,mean_total\n";
  for (const SweepRow& r : report.rows) {
    out << format_g6(r.lambda) << ',' << r.seed << ',' << format_g6(r.acc1) << ','
        << format_g6(r.acc5) << ',' << format_g6(r.drift) << ',' << format_g6(r.mean_ce) << ','
        << format_g6(r.mean_sd) << ',' << format_g6(r.mean_total) << '\n';
  }
}

}  // namespace sdtl
