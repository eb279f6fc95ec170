#include "ddfsim/reference_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddfsim {

double AwgnReferenceTable::threshold_snr_db(double target_pe) const {
  for (const Row& r : rows)
    if (r.fer <= target_pe) return r.snr_db;
  throw std::runtime_error("reference table never reaches the target error probability");
}

void AwgnReferenceTable::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write reference table: " + path);
  out << "snr_db,fer,trials\n";
  char buf[128];
  for (const Row& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%.10g,%ld\n", r.snr_db, r.fer, r.trials);
    out << buf;
  }
}

AwgnReferenceTable AwgnReferenceTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read reference table: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "snr_db,fer,trials")
    throw std::runtime_error("bad reference table header in " + path);
  AwgnReferenceTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Row r{};
    char comma;
    if (!(ss >> r.snr_db >> comma >> r.fer >> comma >> r.trials))
      throw std::runtime_error("bad reference table row: " + line);
    t.rows.push_back(r);
  }
  return t;
}

void enforce_non_increasing(std::vector<AwgnReferenceTable::Row>& rows) {
  // PAVA on the reversed sequence (non-decreasing there), weights = trials.
  const int n = static_cast<int>(rows.size());
  if (n == 0) return;
  std::vector<double> v(n), w(n);
  for (int i = 0; i < n; ++i) {
    v[i] = rows[n - 1 - i].fer;
    w[i] = static_cast<double>(rows[n - 1 - i].trials > 0 ? rows[n - 1 - i].trials : 1);
  }
  std::vector<double> mval, mw;
  std::vector<int> msize;
  for (int i = 0; i < n; ++i) {
    mval.push_back(v[i]);
    mw.push_back(w[i]);
    msize.push_back(1);
    while (mval.size() > 1 && mval[mval.size() - 2] > mval.back()) {
      const double tw = mw[mw.size() - 2] + mw.back();
      const double tv = (mval[mval.size() - 2] * mw[mw.size() - 2] + mval.back() * mw.back()) / tw;
      const int ts = msize[msize.size() - 2] + msize.back();
      mval.pop_back(); mw.pop_back(); msize.pop_back();
      mval.back() = tv; mw.back() = tw; msize.back() = ts;
    }
  }
  int idx = 0;
  for (std::size_t b = 0; b < mval.size(); ++b)
    for (int k = 0; k < msize[b]; ++k) v[idx++] = mval[b];
  for (int i = 0; i < n; ++i) rows[n - 1 - i].fer = v[i];
}

}  // namespace ddfsim
