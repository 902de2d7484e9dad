#pragma once

#include "opext/extensions.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace opext {

inline constexpr int kSchemaVersion = 1;

struct InstanceFile {
    enum class Kind { isometric, symmetric };
    struct Exit {
        long dim = 0;
        cplx point{0.0, 1.0};  // z, symmetric only
        CMatrix t;             // (n+m) x (n+m), ambient
        // A_e; absent means the zero operator on {0}
        std::optional<CMatrix> domain_basis;
        std::optional<CMatrix> action;
    };
    struct Parameter {
        std::string form = "constant";
        cplx anchor{0.0, 1.0};  // lambda0 for a symmetric instance
        CMatrix k;              // n x n ambient
    };

    int schema_version = kSchemaVersion;
    Kind kind = Kind::isometric;
    long ambient_dim = 0;
    CMatrix domain_basis;     // n x d
    CMatrix action_or_range;  // n x d
    std::optional<Exit> exit;
    std::optional<Parameter> parameter;
    std::uint64_t seed = 0;

    IsometryOp isometry() const;
    SymmetricOp symmetric() const;
    std::optional<LinOp> exit_operator() const;
    ExitSpaceModel model(const TolPolicy& tol = {}) const;
};

InstanceFile parse_instance(const std::string& text);
std::string dump_instance(const InstanceFile& inst);
InstanceFile load_instance(const std::string& path);
// written to a temporary file first, then renamed
void save_instance(const InstanceFile& inst, const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace opext
