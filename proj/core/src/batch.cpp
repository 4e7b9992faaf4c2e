#include "malvis/batch.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "csv.hpp"
#include "malvis/error.hpp"
#include "malvis/hash.hpp"
#include "malvis/png_io.hpp"

namespace malvis {

namespace {

BatchFileResult encode_one(const std::string& input,
                           const std::filesystem::path& out_dir,
                           const EncodeOptions& options) {
  BatchFileResult result;
  result.input = input;
  const auto start = std::chrono::steady_clock::now();
  try {
    const ByteStream raw = read_file_bytes(input);
    const std::filesystem::path output =
        out_dir / (sha256_hex(raw.view()) + "." +
                   scheme_name(options.scheme.kind) + ".png");
    const ByteStream data = load_input(input, options.load);
    const RgbImage image = encode_stream(data, options);
    write_png(image, output);
    result.status = "ok";
    result.output = output.string();
    result.input_bytes = data.size();
  } catch (const Error& e) {
    result.status = error_code_name(e.code());
  } catch (const std::exception&) {
    result.status = "InternalError";
  }
  const auto stop = std::chrono::steady_clock::now();
  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return result;
}

}  // namespace

BatchSummary encode_batch(const std::vector<std::string>& inputs,
                          const std::filesystem::path& out_dir,
                          const BatchOptions& options) {
  unsigned workers = options.workers;
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = std::min<unsigned>(workers, std::max<std::size_t>(inputs.size(), 1));

  BatchSummary summary;
  summary.results.resize(inputs.size());

  // The input list is the work queue; each worker claims the next index.
  // Results land in per-input slots, so report order and file contents are
  // independent of scheduling.
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) break;
      summary.results[i] = encode_one(inputs[i], out_dir, options.encode);
    }
  };

  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }

  for (const BatchFileResult& r : summary.results) {
    if (r.status != "ok") ++summary.failures;
  }
  return summary;
}

void write_batch_report(const BatchSummary& summary,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::IoFailure, "cannot write report " + path.string());
  }
  out << "input_path,status,output_path,input_bytes,elapsed_ms\n";
  for (const BatchFileResult& r : summary.results) {
    out << detail::csv_escape(r.input) << ',' << r.status << ','
        << detail::csv_escape(r.output) << ',' << r.input_bytes << ','
        << r.elapsed_ms << '\n';
  }
  if (!out.flush()) {
    raise(ErrorCode::IoFailure, "cannot flush report " + path.string());
  }
}

}  // namespace malvis
