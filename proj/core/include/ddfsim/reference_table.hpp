#pragma once

#include <string>
#include <vector>

namespace ddfsim {

/// AWGN frame-error-rate reference table used by the SNR-threshold
/// forwarding criterion. Rows are sorted by SNR and the FER column is
/// monotone non-increasing (enforced by isotonic regression after
/// estimation).
struct AwgnReferenceTable {
  struct Row {
    double snr_db;
    double fer;
    long trials;
  };
  std::vector<Row> rows;

  /// Smallest grid SNR whose FER is at or below the target error
  /// probability. Throws if the table never reaches the target.
  double threshold_snr_db(double target_pe) const;

  void save_csv(const std::string& path) const;
  static AwgnReferenceTable load_csv(const std::string& path);
};

/// Least-squares monotone non-increasing fit (pool adjacent violators),
/// applied in place to the fer column.
void enforce_non_increasing(std::vector<AwgnReferenceTable::Row>& rows);

}  // namespace ddfsim
