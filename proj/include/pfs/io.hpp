#ifndef PFS_IO_HPP
#define PFS_IO_HPP

#include <string>
#include <vector>

#include "pfs/metrics.hpp"
#include "pfs/signatures.hpp"

namespace pfs {

/// ASCII OBJ (v/f records) or ASCII PLY (vertex + face elements), chosen by
/// content, with polygon faces fan-triangulated. Throws ParseError naming the
/// offending line, UnsupportedFormat for anything else.
TriangleMesh load_mesh(const std::string& path);

/// Silhouette files: ".json" paths use {"points": [[x, y], ...]}, everything
/// else is CSV with one "x,y" vertex per line and no header. Doubles are
/// written with 17 significant digits, so save/load roundtrips bit-exactly.
/// load throws ParseError on malformed content and DegenerateSilhouette when
/// the polygon fails check_silhouette.
Silhouette load_silhouette(const std::string& path);
void save_silhouette(const Silhouette& sil, const std::string& path);

/// Signature bundle: one UTF-8 JSON header line (format tag, version, kind,
/// grid resolution, projection mode, depth prior, fingerprint, point count,
/// alpha, seed), then a little-endian binary payload of packed mask bits and
/// the masked values as 64-bit floats, closed by an FNV-1a checksum over
/// header and payload. Roundtrips bit-exactly. load throws VersionMismatch on
/// an unrecognized version and CorruptPayload on any length or checksum
/// disagreement.
void save_bundle(const SignatureField& field, const std::string& path);
SignatureField load_bundle(const std::string& path);

/// Benchmark report: JSON with one record per trial (the PoseError plus the
/// success flag) and Mean/SD/Max aggregates per metric. An empty trial list
/// writes an explicit "no trials" note instead of NaN aggregates. Field
/// ordering is fixed, so equal inputs produce identical bytes.
void write_report(const std::vector<PoseError>& results, const std::string& path);

/// Plain CSV: a header row and numeric rows, 17-significant-digit doubles.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace pfs

#endif
