#include "malvis/perturb.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "malvis/entropy.hpp"
#include "malvis/error.hpp"
#include "malvis/png_io.hpp"

namespace malvis {

namespace {

void check_fraction(double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    raise(ErrorCode::DomainError,
          "fraction " + std::to_string(fraction) + " outside (0,1]");
  }
}

std::size_t prefix_length(std::size_t total, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total)));
}

struct CipherCtxFree {
  void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};

}  // namespace

ByteStream encrypt_prefix(const ByteStream& data, double fraction, const AesKey& key) {
  check_fraction(fraction);
  std::vector<std::uint8_t> out(data.bytes());
  const std::size_t block_bytes = (prefix_length(data.size(), fraction) / 16) * 16;
  if (block_bytes == 0) {
    return ByteStream(std::move(out), data.origin() + "+aes(0)");
  }

  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree> ctx(EVP_CIPHER_CTX_new());
  if (!ctx ||
      EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ecb(), nullptr, key.data(),
                         nullptr) != 1) {
    raise(ErrorCode::IoFailure, "AES-256-ECB initialization failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);

  int produced = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &produced, data.bytes().data(),
                        static_cast<int>(block_bytes)) != 1 ||
      static_cast<std::size_t>(produced) != block_bytes) {
    raise(ErrorCode::IoFailure, "AES-256-ECB encryption failed");
  }
  int tail = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + produced, &tail) != 1 || tail != 0) {
    raise(ErrorCode::IoFailure, "AES-256-ECB finalization failed");
  }
  return ByteStream(std::move(out),
                    data.origin() + "+aes(" + std::to_string(block_bytes) + ")");
}

ByteStream inject_random_prefix(const ByteStream& data, double fraction,
                                std::uint64_t seed) {
  check_fraction(fraction);
  std::vector<std::uint8_t> out(data.bytes());
  const std::size_t n = prefix_length(data.size(), fraction);

  // Raw engine output split into bytes keeps the sequence identical across
  // standard library implementations.
  std::mt19937_64 engine(seed);
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t word = engine();
    for (int b = 0; b < 8 && i < n; ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word & 0xFF);
      word >>= 8;
    }
  }
  return ByteStream(std::move(out),
                    data.origin() + "+rand(" + std::to_string(n) + ")");
}

namespace {

RegionStats stats_from_pixels(const std::vector<Rgb>& pixels,
                              const ByteStream& data,
                              const EncodingScheme& scheme, RowInterval region,
                              std::uint32_t width) {
  RegionStats stats;
  stats.region = region;
  const std::size_t lo = static_cast<std::size_t>(region.begin) * width;
  const std::size_t hi =
      std::min(static_cast<std::size_t>(region.end) * width, pixels.size());
  if (lo >= hi) return stats;  // empty region: all-zero statistics

  double sum_r = 0, sum_g = 0, sum_b = 0;
  double sq_r = 0, sq_g = 0, sq_b = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double r = pixels[i].r, g = pixels[i].g, b = pixels[i].b;
    sum_r += r; sum_g += g; sum_b += b;
    sq_r += r * r; sq_g += g * g; sq_b += b * b;
  }
  const double n = static_cast<double>(hi - lo);
  stats.pixel_count = hi - lo;
  stats.mean_r = sum_r / n;
  stats.mean_g = sum_g / n;
  stats.mean_b = sum_b / n;
  stats.var_r = sq_r / n - stats.mean_r * stats.mean_r;
  stats.var_g = sq_g / n - stats.mean_g * stats.mean_g;
  stats.var_b = sq_b / n - stats.mean_b * stats.mean_b;

  // Mean window entropy over the same byte range, rescaled from the
  // alphabet normalization to the window-capacity normalization.
  const EntropyConfig& cfg = scheme.entropy;
  const double capacity = std::log2(static_cast<double>(
      std::min<std::uint32_t>(cfg.alphabet_size, cfg.window_size)));
  const double rescale =
      capacity > 0.0 ? std::log2(static_cast<double>(cfg.alphabet_size)) / capacity
                     : 1.0;
  EntropyScanner scanner(data.view(), cfg);
  double sum_e = 0.0;
  for (std::size_t x = 0; x < hi; ++x) {
    const double e = scanner.next();
    if (x >= lo) sum_e += e * rescale;
  }
  stats.mean_entropy = sum_e / n;
  return stats;
}

}  // namespace

RegionStats region_stats(const ByteStream& data, const EncodingScheme& scheme,
                         RowInterval region, std::uint32_t width) {
  if (data.empty()) {
    raise(ErrorCode::EmptyInput, "cannot compute region stats of an empty stream");
  }
  const std::uint32_t height =
      static_cast<std::uint32_t>((data.size() + width - 1) / width);
  if (region.begin > region.end || region.end > height) {
    raise(ErrorCode::RegionOutOfRange,
          "rows [" + std::to_string(region.begin) + "," +
              std::to_string(region.end) + ") outside image height " +
              std::to_string(height));
  }
  return stats_from_pixels(encode_pixels(data, scheme), data, scheme, region, width);
}

ShiftReport run_experiment(const ByteStream& original,
                           const ExperimentOptions& options) {
  check_fraction(options.fraction);
  ByteStream perturbed =
      options.kind == ExperimentKind::Encrypt
          ? encrypt_prefix(original, options.fraction, options.key)
          : inject_random_prefix(original, options.fraction, options.seed);

  std::size_t perturbed_bytes = prefix_length(original.size(), options.fraction);
  if (options.kind == ExperimentKind::Encrypt) {
    perturbed_bytes = (perturbed_bytes / 16) * 16;
  }
  const std::uint32_t prefix_rows = static_cast<std::uint32_t>(
      (perturbed_bytes + options.width - 1) / options.width);
  const RowInterval region{0, prefix_rows};

  ShiftReport report;
  report.experiment = options.kind;
  report.scheme = options.scheme.kind;
  report.fraction = options.fraction;
  report.perturbed_bytes = perturbed_bytes;
  report.before = region_stats(original, options.scheme, region, options.width);
  report.after = region_stats(perturbed, options.scheme, region, options.width);
  report.delta_mean_r = report.after.mean_r - report.before.mean_r;
  report.delta_mean_g = report.after.mean_g - report.before.mean_g;
  report.delta_mean_b = report.after.mean_b - report.before.mean_b;
  report.delta_mean_entropy =
      report.after.mean_entropy - report.before.mean_entropy;

  if (options.emit_dir) {
    const std::string suffix =
        std::string(".") + scheme_name(options.scheme.kind) + ".png";
    write_png(reshape(encode_pixels(original, options.scheme), options.width),
              *options.emit_dir / (options.emit_stem + ".original" + suffix));
    write_png(reshape(encode_pixels(perturbed, options.scheme), options.width),
              *options.emit_dir / (options.emit_stem + ".perturbed" + suffix));
  }
  return report;
}

namespace {

void append_stats(std::ostringstream& out, const char* prefix,
                  const RegionStats& stats) {
  out << prefix << ".rows: [" << stats.region.begin << "," << stats.region.end
      << ")\n";
  out << prefix << ".pixels: " << stats.pixel_count << "\n";
  out << prefix << ".mean_r: " << stats.mean_r << "\n";
  out << prefix << ".mean_g: " << stats.mean_g << "\n";
  out << prefix << ".mean_b: " << stats.mean_b << "\n";
  out << prefix << ".var_r: " << stats.var_r << "\n";
  out << prefix << ".var_g: " << stats.var_g << "\n";
  out << prefix << ".var_b: " << stats.var_b << "\n";
  out << prefix << ".mean_entropy: " << stats.mean_entropy << "\n";
}

}  // namespace

std::string format_shift_report(const ShiftReport& report) {
  std::ostringstream out;
  out << "experiment: "
      << (report.experiment == ExperimentKind::Encrypt ? "encrypt" : "inject")
      << "\n";
  out << "scheme: " << scheme_name(report.scheme) << "\n";
  out << "fraction: " << report.fraction << "\n";
  out << "perturbed_bytes: " << report.perturbed_bytes << "\n";
  append_stats(out, "before", report.before);
  append_stats(out, "after", report.after);
  out << "delta.mean_r: " << report.delta_mean_r << "\n";
  out << "delta.mean_g: " << report.delta_mean_g << "\n";
  out << "delta.mean_b: " << report.delta_mean_b << "\n";
  out << "delta.mean_entropy: " << report.delta_mean_entropy << "\n";
  return out.str();
}

}  // namespace malvis
