#include "pacer/table_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pacer/errors.hpp"
#include "pacer/fnv.hpp"

namespace pacer {

namespace {

constexpr char kMagic[] = {'P', 'A', 'C', 'R', 'D', 'P', '1'};

class Writer {
public:
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void i32(std::int32_t v) {
        const auto u = static_cast<std::uint32_t>(v);
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(u >> (8 * i)));
    }
    std::vector<unsigned char> buf;
};

class Reader {
public:
    Reader(const std::vector<unsigned char>& b, const std::string& name) : b_(b), name_(name) {}

    void need(std::size_t n) const {
        if (pos_ + n > b_.size())
            throw InputError(name_ + ": truncated table file at byte " + std::to_string(pos_));
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::int32_t i32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return static_cast<std::int32_t>(v);
    }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return b_.size() - pos_; }
    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }

private:
    const std::vector<unsigned char>& b_;
    std::string name_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_tables(const ValueTables& t) {
    Writer w;
    w.buf.insert(w.buf.end(), std::begin(kMagic), std::end(kMagic));
    w.u64(t.n_stages);
    w.u64(static_cast<std::uint64_t>(t.grid.n_v));
    w.u64(static_cast<std::uint64_t>(t.grid.n_w));
    const auto& c = t.config;
    for (double v : {c.dx, c.v_min, c.v_max, c.tie_epsilon, c.v0.value_or(c.v_min),
                     c.w0.value_or(t.grid.awc), t.grid.awc})
        w.f64(v);
    const auto& f = t.fingerprints;
    for (auto v : {f.config, f.rider, f.physics, f.course, f.combined}) w.u64(v);
    for (double v : t.cost) w.f64(v);
    for (auto v : t.policy) w.i32(v);
    Fnv1a h;
    h.bytes(w.buf.data(), w.buf.size());
    w.u64(h.value());
    return std::move(w.buf);
}

ValueTables decode_tables(const std::vector<unsigned char>& bytes, const std::string& name) {
    Reader r(bytes, name);
    r.need(sizeof kMagic);
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw InputError(name + ": not a PACRDP1 table file");
    r.skip(sizeof kMagic);

    ValueTables t;
    t.n_stages = r.u64();
    const auto n_v = r.u64();
    const auto n_w = r.u64();
    if (t.n_stages == 0 || n_v < 2 || n_w < 2 || n_v > (1u << 20) || n_w > (1u << 20) ||
        t.n_stages > (1u << 24))
        throw InputError(name + ": implausible table dimensions");
    const std::size_t layer = n_v * n_w;
    const std::size_t payload = 7 * 8 + 5 * 8 + (t.n_stages + 1) * layer * 8 +
                                t.n_stages * layer * 4 + 8;
    if (r.remaining() < payload)
        throw InputError(name + ": truncated table file (" + std::to_string(bytes.size()) +
                         " bytes)");
    if (r.remaining() > payload) throw InputError(name + ": trailing bytes after table data");

    auto& c = t.config;
    c.n_v = static_cast<int>(n_v);
    c.n_w = static_cast<int>(n_w);
    c.dx = r.f64();
    c.v_min = r.f64();
    c.v_max = r.f64();
    c.tie_epsilon = r.f64();
    c.v0 = r.f64();
    c.w0 = r.f64();
    const double awc = r.f64();
    t.grid = StateGrid(c, awc);

    auto& f = t.fingerprints;
    f.config = r.u64();
    f.rider = r.u64();
    f.physics = r.u64();
    f.course = r.u64();
    f.combined = r.u64();

    t.cost.resize((t.n_stages + 1) * layer);
    for (auto& v : t.cost) v = r.f64();
    t.policy.resize(t.n_stages * layer);
    for (auto& v : t.policy) v = r.i32();

    const std::size_t body = r.pos();
    const auto stored = r.u64();
    Fnv1a h;
    h.bytes(bytes.data(), body);
    if (h.value() != stored) throw InputError(name + ": table checksum mismatch");
    return t;
}

void export_tables(const ValueTables& t, const std::filesystem::path& path) {
    const auto bytes = encode_tables(t);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(path.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
    if (!out) throw InputError(path.string() + ": write failed");
}

ValueTables import_tables(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open table file");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_tables(bytes, path.string());
}

ValueTables import_tables(const std::filesystem::path& path, const CourseProfile& course,
                          const RiderModel& m, const PhysicsParams& prm) {
    ValueTables t = import_tables(path);
    check_fingerprints(t, course, m, prm);
    return t;
}

}  // namespace pacer
