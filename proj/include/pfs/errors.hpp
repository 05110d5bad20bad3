#ifndef PFS_ERRORS_HPP
#define PFS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pfs {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateSilhouette : Error {
    explicit DegenerateSilhouette(const std::string& msg = "degenerate silhouette")
        : Error(msg) {}
};

struct InsufficientPoints : Error {
    explicit InsufficientPoints(const std::string& msg = "insufficient points")
        : Error(msg) {}
};

struct DegenerateProjection : Error {
    explicit DegenerateProjection(const std::string& msg = "degenerate projection")
        : Error(msg) {}
};

struct EllipseFitFailure : Error {
    explicit EllipseFitFailure(const std::string& msg = "ellipse fit failed")
        : Error(msg) {}
};

struct PointBehindCamera : Error {
    explicit PointBehindCamera(const std::string& msg = "point behind camera")
        : Error(msg) {}
};

struct EmptyMesh : Error {
    explicit EmptyMesh(const std::string& msg = "empty mesh") : Error(msg) {}
};

struct DegenerateConfiguration : Error {
    explicit DegenerateConfiguration(const std::string& msg = "degenerate configuration")
        : Error(msg) {}
};

struct OutsideField : Error {
    explicit OutsideField(const std::string& msg = "query outside field coverage")
        : Error(msg) {}
};

struct NoCandidates : Error {
    explicit NoCandidates(const std::string& msg = "no candidate poses found")
        : Error(msg) {}
};

struct FingerprintMismatch : Error {
    explicit FingerprintMismatch(const std::string& msg = "template fingerprint mismatch")
        : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct UnsupportedFormat : Error {
    explicit UnsupportedFormat(const std::string& msg = "unsupported file format")
        : Error(msg) {}
};

struct VersionMismatch : Error {
    explicit VersionMismatch(const std::string& msg = "unrecognized bundle version")
        : Error(msg) {}
};

struct CorruptPayload : Error {
    explicit CorruptPayload(const std::string& msg = "corrupt bundle payload")
        : Error(msg) {}
};

}  // namespace pfs

#endif
