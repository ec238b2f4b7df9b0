#include <bilu/bench.hpp>

#include <bilu/matrix_market.hpp>
#include <bilu/poisson.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace bilu::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// shortest representation that parses back to the same double
std::string exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

template <typename T>
T parse_field(std::string_view tok, std::size_t line, const char* name) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(std::string("bad ") + name + " '" + std::string(tok) + "'",
                     line);
  return value;
}

}  // namespace

bool BenchOutcome::all_converged() const noexcept {
  for (const auto& r : records)
    if (!r.converged) return false;
  return true;
}

CsrMatrix load_matrix(const MatrixSource& source) {
  switch (source.kind) {
    case MatrixSource::Kind::poisson:
      return gen_poisson_3d(source.nx, source.ny, source.nz);
    case MatrixSource::Kind::matrix_market:
      return read_matrix_market(std::filesystem::path(source.path));
  }
  throw std::invalid_argument("load_matrix: unknown source kind");
}

Vector make_rhs(const CsrMatrix& a, RhsKind kind, std::uint64_t seed,
                int workers) {
  Vector x(static_cast<std::size_t>(a.num_cols()), 1.0);
  if (kind == RhsKind::random) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : x) v = dist(gen);
  }
  return spmv(a, x, workers);
}

BenchOutcome run_bench(const BenchPlan& plan) {
  return run_bench(plan, load_matrix(plan.source));
}

BenchOutcome run_bench(const BenchPlan& plan, const CsrMatrix& a) {
  if (a.num_rows() != a.num_cols())
    throw DimensionError("run_bench: matrix is not square");
  BenchOutcome out;
  out.num_rows = a.num_rows();
  out.nnz = a.nnz();

  for (index_t bs : plan.block_sizes) {
    std::string reason;
    if (bs < 1)
      reason = "block size must be >= 1";
    else if (a.num_rows() % bs != 0)
      reason = "block size " + std::to_string(bs) + " does not divide n = " +
               std::to_string(a.num_rows());
    if (!reason.empty()) {
      for (int k : plan.k_levels)
        for (int p : plan.threads) out.skipped.push_back({bs, k, p, reason});
      continue;
    }
    const BcsrMatrix blocked = bcsr_from_csr(a, bs);

    for (int k : plan.k_levels) {
      for (int p : plan.threads) {
        BenchRecord rec;
        rec.block_size = bs;
        rec.k = k;
        rec.threads = p;

        SolverConfig cfg = plan.solver;
        cfg.workers = p;
        const Vector b = make_rhs(a, plan.rhs, plan.seed, p);

        const auto t0 = Clock::now();
        std::optional<BlockIlukPreconditioner> m;
        try {
          m.emplace(build_preconditioner(blocked, FillParams{k}), p);
        } catch (const std::exception& e) {
          out.skipped.push_back({bs, k, p, e.what()});
          continue;
        }
        rec.setup_seconds = seconds_since(t0);

        SolveResult res = gmres(a, b, *m, cfg);
        rec.solve_seconds = res.stats.solve_seconds;
        rec.iterations = res.stats.iterations;
        rec.converged = res.stats.converged;
        rec.final_residual = res.stats.final_relative_residual;
        out.records.push_back(rec);
      }
    }
  }
  return out;
}

std::string emit_report(std::span<const BenchRecord> records,
                        ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
      os << r.block_size << ',' << r.k << ',' << r.threads << ','
         << exact(r.setup_seconds) << ',' << exact(r.solve_seconds) << ','
         << r.iterations << ',' << (r.converged ? 1 : 0) << ','
         << exact(r.final_residual) << '\n';
    }
    return os.str();
  }

  // single-thread solve time per (bs, k), for the speedup column
  std::map<std::pair<index_t, int>, double> serial;
  for (const auto& r : records)
    if (r.threads == 1) serial.emplace(std::make_pair(r.block_size, r.k), r.solve_seconds);

  const char* rule =
      "-----------------------------------------------------------------------"
      "------\n";
  os << pad_left("k", 3) << pad_left("threads", 9) << pad_left("setup (s)", 12)
     << pad_left("solve (s)", 12) << pad_left("iterations", 12)
     << pad_left("converged", 11) << pad_left("residual", 11)
     << pad_left("speedup", 9) << '\n';
  bool first = true;
  index_t section = -1;
  for (const auto& r : records) {
    if (first || r.block_size != section) {
      os << rule << "block size " << r.block_size << '\n';
      section = r.block_size;
      first = false;
    }
    std::string speedup = "-";
    auto it = serial.find({r.block_size, r.k});
    if (it != serial.end() && r.solve_seconds > 0.0)
      speedup = fixed(it->second / r.solve_seconds, 2);
    os << pad_left(std::to_string(r.k), 3)
       << pad_left(std::to_string(r.threads), 9)
       << pad_left(fixed(r.setup_seconds, 4), 12)
       << pad_left(fixed(r.solve_seconds, 4), 12)
       << pad_left(std::to_string(r.iterations), 12)
       << pad_left(r.converged ? "yes" : "no", 11)
       << pad_left(sci(r.final_residual), 11) << pad_left(speedup, 9) << '\n';
  }
  if (!records.empty()) os << rule;
  return os.str();
}

std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError("unexpected CSV header", line_no);
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 8)
      throw ParseError("expected 8 fields, got " + std::to_string(f.size()),
                       line_no);
    BenchRecord r;
    r.block_size = parse_field<index_t>(f[0], line_no, "block_size");
    r.k = parse_field<int>(f[1], line_no, "k");
    r.threads = parse_field<int>(f[2], line_no, "threads");
    r.setup_seconds = parse_field<double>(f[3], line_no, "setup_s");
    r.solve_seconds = parse_field<double>(f[4], line_no, "solve_s");
    r.iterations = parse_field<int>(f[5], line_no, "iterations");
    const int conv = parse_field<int>(f[6], line_no, "converged");
    if (conv != 0 && conv != 1) throw ParseError("converged must be 0 or 1", line_no);
    r.converged = conv == 1;
    r.final_residual = parse_field<double>(f[7], line_no, "residual");
    out.push_back(r);
  }
  if (!header_seen) throw ParseError("missing CSV header", 1);
  return out;
}

}  // namespace bilu::bench
