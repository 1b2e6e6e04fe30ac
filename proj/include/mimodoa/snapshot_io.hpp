#pragma once

// Binary snapshot container. All fields little-endian:
//
//   offset  size  field
//   0       8     magic "MDSNAP01"
//   8       4     u32 n_tx
//   12      4     u32 n_rx
//   16      8     u64 M (number of snapshots)
//   24      8     f64 d_over_lambda
//   32      8     f64 phi_trx_deg
//   40      ...   M * n_tx * n_rx complex samples, snapshot-major, each as
//                 interleaved (re, im) f64 pairs
//
// Sample (m, i) is virtual element i of snapshot m.

#include <iosfwd>
#include <string>

#include "mimodoa/scene.hpp"

namespace mimodoa {

inline constexpr char kSnapshotMagic[8] = {'M', 'D', 'S', 'N', 'A', 'P', '0', '1'};

void write_snapshots(std::ostream& out, const SnapshotSet& snapshots);
void write_snapshots(const std::string& path, const SnapshotSet& snapshots);

/// Throws IoError on truncation, a bad magic, or inconsistent dimensions.
SnapshotSet read_snapshots(std::istream& in);
SnapshotSet read_snapshots(const std::string& path);

}  // namespace mimodoa
