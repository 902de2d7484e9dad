#include "opext/instance_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace opext {

using nlohmann::json;

namespace {

json enc(cplx c) { return json::array({c.real(), c.imag()}); }

json enc(const CMatrix& m) {
    json rows = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(enc(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

cplx dec_c(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(where + ": complex numbers are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix dec_m(const json& j, long rows, long cols, const std::string& where) {
    if (!j.is_array() || static_cast<long>(j.size()) != rows) throw ParseError(where + ": wrong number of rows");
    if (cols < 0) cols = rows == 0 ? 0 : static_cast<long>(j[0].size());
    CMatrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<long>(row.size()) != cols) throw ParseError(where + ": ragged rows");
        for (long c = 0; c < cols; ++c) m(i, c) = dec_c(row[static_cast<std::size_t>(c)], where);
    }
    return m;
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

}  // namespace

IsometryOp InstanceFile::isometry() const {
    if (kind != Kind::isometric) throw KindMismatch("instance is not isometric");
    try {
        return IsometryOp::make(Subspace(ambient_dim, domain_basis), action_or_range, 1e-9);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid isometric operator: ") + e.what());
    }
}

SymmetricOp InstanceFile::symmetric() const {
    if (kind != Kind::symmetric) throw KindMismatch("instance is not symmetric");
    try {
        return SymmetricOp::make(Subspace(ambient_dim, domain_basis), action_or_range, 1e-9);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid symmetric operator: ") + e.what());
    }
}

std::optional<LinOp> InstanceFile::exit_operator() const {
    if (!exit || !exit->domain_basis) return std::nullopt;
    try {
        return SymmetricOp::make(Subspace(exit->dim, *exit->domain_basis), *exit->action, 1e-9);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid exit operator: ") + e.what());
    }
}

ExitSpaceModel InstanceFile::model(const TolPolicy& tol) const {
    if (!exit) throw PreconditionViolated("instance has no exit block");
    const long n = ambient_dim;
    if (kind == Kind::isometric) return unitary_model(isometry(), exit->dim, exit->t, tol);
    LinOp a = symmetric();
    if (auto ae = exit_operator()) {
        // T may be partial: its source is the row space of T
        Subspace src = orthonormalize(exit->t.adjoint(), tol);
        return exit_space_extension(a, *ae, exit->point, PartialMap::from_ambient(src, exit->t), tol);
    }
    return exit_space_extension(a, exit->dim, exit->point, BlockParam::split(exit->t, n), tol);
}

InstanceFile parse_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("instance must be a JSON object");
    InstanceFile inst;
    try {
        inst.schema_version = field(j, "schema_version").get<int>();
        if (inst.schema_version != kSchemaVersion)
            throw ParseError("unsupported schema_version " + std::to_string(inst.schema_version));
        std::string kind = field(j, "kind").get<std::string>();
        if (kind == "isometric")
            inst.kind = InstanceFile::Kind::isometric;
        else if (kind == "symmetric")
            inst.kind = InstanceFile::Kind::symmetric;
        else
            throw ParseError("kind must be isometric or symmetric");
        inst.ambient_dim = field(j, "ambient_dim").get<long>();
        if (inst.ambient_dim < 1) throw ParseError("ambient_dim must be positive");
        const long n = inst.ambient_dim;
        inst.domain_basis = dec_m(field(j, "domain_basis"), n, -1, "domain_basis");
        inst.action_or_range = dec_m(field(j, "action_or_range"), n, inst.domain_basis.cols(), "action_or_range");
        if (auto it = j.find("seed"); it != j.end()) inst.seed = it->get<std::uint64_t>();
        if (auto it = j.find("exit"); it != j.end()) {
            InstanceFile::Exit e;
            e.dim = field(*it, "dim").get<long>();
            if (e.dim < 0) throw ParseError("exit.dim must be non-negative");
            if (auto p = it->find("point"); p != it->end()) e.point = dec_c(*p, "exit.point");
            e.t = dec_m(field(*it, "T"), n + e.dim, n + e.dim, "exit.T");
            if (auto d = it->find("domain_basis"); d != it->end()) {
                e.domain_basis = dec_m(*d, e.dim, -1, "exit.domain_basis");
                e.action = dec_m(field(*it, "action"), e.dim, e.domain_basis->cols(), "exit.action");
            }
            inst.exit = e;
        }
        if (auto it = j.find("parameter"); it != j.end()) {
            InstanceFile::Parameter p;
            p.form = field(*it, "form").get<std::string>();
            if (p.form != "constant") throw ParseError("only constant parameters are stored in files");
            if (auto a = it->find("anchor"); a != it->end()) p.anchor = dec_c(*a, "parameter.anchor");
            p.k = dec_m(field(*it, "K"), n, n, "parameter.K");
            inst.parameter = p;
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field type: ") + e.what());
    }
    // validates the operator part
    if (inst.kind == InstanceFile::Kind::isometric)
        (void)inst.isometry();
    else
        (void)inst.symmetric();
    (void)inst.exit_operator();
    return inst;
}

std::string dump_instance(const InstanceFile& inst) {
    json j;
    j["schema_version"] = inst.schema_version;
    j["kind"] = inst.kind == InstanceFile::Kind::isometric ? "isometric" : "symmetric";
    j["ambient_dim"] = inst.ambient_dim;
    j["domain_basis"] = enc(inst.domain_basis);
    j["action_or_range"] = enc(inst.action_or_range);
    j["seed"] = inst.seed;
    if (inst.exit) {
        json e;
        e["dim"] = inst.exit->dim;
        if (inst.kind == InstanceFile::Kind::symmetric) e["point"] = enc(inst.exit->point);
        e["T"] = enc(inst.exit->t);
        if (inst.exit->domain_basis) {
            e["domain_basis"] = enc(*inst.exit->domain_basis);
            e["action"] = enc(*inst.exit->action);
        }
        j["exit"] = e;
    }
    if (inst.parameter) {
        json p;
        p["form"] = inst.parameter->form;
        p["anchor"] = enc(inst.parameter->anchor);
        p["K"] = enc(inst.parameter->k);
        j["parameter"] = p;
    }
    return j.dump(1) + "\n";
}

InstanceFile load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out << content;
        if (!out) throw IoError("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot move output into place at " + path);
    }
}

void save_instance(const InstanceFile& inst, const std::string& path) { write_file_atomic(path, dump_instance(inst)); }

}  // namespace opext
