#include "mdcrbm/model_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "mdcrbm/errors.hpp"
#include "mdcrbm/numeric.hpp"

namespace mdcrbm {

namespace {

constexpr char kMagic[8] = {'M', 'D', 'C', 'R', 'B', 'M', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_f64_block(std::vector<unsigned char>& buf, const double* data, std::size_t n) {
    std::size_t at = buf.size();
    buf.resize(at + 8 * n);
    for (std::size_t i = 0; i < n; ++i) store_f64le(buf.data() + at + 8 * i, data[i]);
}

}  // namespace

void save_model(const std::string& path, const Model& model) {
    model.params.check_shapes();
    if (!model.params.all_finite()) throw Error("refusing to save non-finite parameters", 3);
    std::string schema_text = render_schema(model.schema, &model.norm);

    std::vector<unsigned char> buf;
    buf.insert(buf.end(), kMagic, kMagic + 8);
    buf.resize(buf.size() + 4);
    store_u32le(buf.data() + buf.size() - 4, kVersion);
    buf.resize(buf.size() + 8);
    store_u64le(buf.data() + buf.size() - 8, schema_text.size());
    buf.insert(buf.end(), schema_text.begin(), schema_text.end());

    const auto& p = model.params;
    buf.resize(buf.size() + 8);
    store_u32le(buf.data() + buf.size() - 8, static_cast<std::uint32_t>(p.J()));
    store_u32le(buf.data() + buf.size() - 4, static_cast<std::uint32_t>(p.K()));

    // Row-major W: K rows of J entries.
    for (int i = 0; i < p.K(); ++i)
        for (int j = 0; j < p.J(); ++j) {
            buf.resize(buf.size() + 8);
            store_f64le(buf.data() + buf.size() - 8, p.W(i, j));
        }
    put_f64_block(buf, p.b.data(), static_cast<std::size_t>(p.K()));
    put_f64_block(buf, p.c.data(), static_cast<std::size_t>(p.J()));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

    std::size_t at = 0;
    auto need = [&](std::size_t n) {
        if (at + n > buf.size()) throw ModelFormatError("truncated file: " + path);
    };

    need(8);
    if (std::memcmp(buf.data(), kMagic, 8) != 0) throw ModelFormatError("bad magic: " + path);
    at = 8;
    need(4);
    std::uint32_t version = load_u32le(buf.data() + at);
    at += 4;
    if (version != kVersion)
        throw ModelFormatError("format version " + std::to_string(version) + ", expected " +
                               std::to_string(kVersion));
    need(8);
    std::uint64_t schema_len = load_u64le(buf.data() + at);
    at += 8;
    need(schema_len);
    std::string schema_text(reinterpret_cast<const char*>(buf.data() + at),
                            static_cast<std::size_t>(schema_len));
    at += schema_len;

    Model model;
    auto [schema, norm] = parse_schema(schema_text);
    model.schema = std::move(schema);
    model.norm = std::move(norm);

    need(8);
    std::uint32_t J = load_u32le(buf.data() + at);
    std::uint32_t K = load_u32le(buf.data() + at + 4);
    at += 8;
    if (static_cast<int>(K) != model.schema.width())
        throw ModelFormatError("K " + std::to_string(K) + " does not match schema width " +
                               std::to_string(model.schema.width()));

    auto& p = model.params;
    p.layout = model.schema.layout();
    p.W.resize(K, J);
    p.b.resize(K);
    p.c.resize(J);
    need(8ull * (static_cast<std::uint64_t>(K) * J + K + J));
    for (std::uint32_t i = 0; i < K; ++i)
        for (std::uint32_t j = 0; j < J; ++j) {
            p.W(i, j) = load_f64le(buf.data() + at);
            at += 8;
        }
    for (std::uint32_t i = 0; i < K; ++i) {
        p.b[i] = load_f64le(buf.data() + at);
        at += 8;
    }
    for (std::uint32_t j = 0; j < J; ++j) {
        p.c[j] = load_f64le(buf.data() + at);
        at += 8;
    }
    if (at != buf.size()) throw ModelFormatError("trailing bytes: " + path);
    p.check_shapes();
    return model;
}

}  // namespace mdcrbm
