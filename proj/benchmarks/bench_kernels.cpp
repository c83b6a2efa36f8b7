// Compares the OpenMP kernels against their serial reference
// implementations: dense matmul, crossbar batch simulation, and the AME
// Monte-Carlo loop.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "aqbnn/hw_inference.hpp"
#include "aqbnn/tensor.hpp"

using namespace aqbnn;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Matrix random_matrix(int r, int c, RandomStream& rng) {
    Matrix m(r, c);
    for (auto& v : m.data) v = static_cast<float>(rng.uniform(-1, 1));
    return m;
}

void bench_matmul() {
    RandomStream rng(1);
    std::printf("%-28s %10s %10s %8s\n", "matmul (NxKxF)", "serial ms", "omp ms", "speedup");
    for (int n : {256, 512, 1024}) {
        const Matrix a = random_matrix(n, n, rng);
        const Matrix b = random_matrix(n, n, rng);
        Matrix c1(n, n), c2(n, n);

        const double t0 = now_ms();
        ref::matmul(a, b, c1);
        const double t1 = now_ms();
        matmul(a, b, c2);
        const double t2 = now_ms();
        if (c1.data != c2.data) std::printf("MISMATCH at n=%d!\n", n);
        std::printf("%4dx%4dx%4d                %10.1f %10.1f %7.2fx\n", n, n, n, t1 - t0,
                    t2 - t1, (t1 - t0) / (t2 - t1));
    }
}

// Serial twin of bin_block_simulate for the benchmark baseline: same
// keyed draws, plain loops.
Matrix simulate_serial(const BinLayer& bin, const Matrix& acts, const HwParams& hw, int window,
                       const RandomStream& stream) {
    const int k = bin.fan_in(), f = bin.out_channels(), c_s = hw.crossbar_size;
    std::vector<int8_t> w_b(k * f);
    for (size_t i = 0; i < w_b.size(); ++i) w_b[i] = bin.w_r.data[i] >= 0 ? 1 : -1;
    auto [plan, xbars] = partition_layer(w_b, k, f, c_s);
    const FoldedThreshold folded = fold_bn(bin.bn, bin.alpha, c_s, hw.att);
    const double i1 = unit_current(c_s, hw.att);

    Matrix out(acts.rows, f);
    for (int n = 0; n < acts.rows; ++n) {
        const RandomStream row = stream.derive(n);
        std::vector<std::vector<int>> sums(plan.num_crossbars);
        for (int m = 0; m < plan.num_crossbars; ++m) {
            std::vector<int8_t> slice(c_s, 1);
            const auto [begin, end] = plan.row_ranges[m];
            for (int r = begin; r < end; ++r) slice[r - begin] = static_cast<int8_t>(acts.at(n, r));
            sums[m] = column_sums(xbars[m], slice);
        }
        for (int c = 0; c < f; ++c) {
            const std::vector<double> parts =
                distribute_threshold(folded.i_th_uA[c], plan.num_crossbars);
            const RandomStream col = row.derive(c);
            long long total = 0;
            for (int m = 0; m < plan.num_crossbars; ++m) {
                BufferModel buf = hw.buffer;
                buf.i_th = parts[m];
                double p = buffer_prob(sums[m][c] * i1, buf);
                if (folded.flip[c]) p = 1.0 - p;
                const RandomStream bits = col.derive(m);
                for (int t = 0; t < window; ++t) total += bits.uniform_at(t) < p ? 1 : 0;
            }
            const long long t0 = (static_cast<long long>(plan.num_crossbars) * window + 1) / 2;
            out.at(n, c) = total >= t0 ? 1.0f : -1.0f;
        }
    }
    return out;
}

void bench_simulate() {
    RandomStream rng(2);
    HwParams hw;
    hw.crossbar_size = 16;
    hw.bitstream_length = 16;
    hw.buffer.delta_i_in = 2.4;
    hw.att = AttenuationModel{70.0, 1.9};

    BinLayer bin;
    bin.kind = BinLayer::Kind::dense;
    bin.w_r = random_matrix(512, 512, rng);
    bin.alpha.assign(512, 1.0f);
    bin.bn = BnParams::identity(512);

    Matrix acts(256, 512);
    for (auto& v : acts.data) v = rng.bernoulli(0.5) ? 1.0f : -1.0f;

    std::printf("\n%-28s %10s %10s %8s\n", "crossbar simulate", "serial ms", "omp ms", "speedup");
    const double t0 = now_ms();
    const Matrix serial = simulate_serial(bin, acts, hw, 16, RandomStream(3));
    const double t1 = now_ms();
    const Matrix parallel =
        bin_block_simulate(bin, acts, hw, 16, ThresholdMode::analog, RandomStream(3));
    const double t2 = now_ms();
    if (serial.data != parallel.data) std::printf("MISMATCH in simulate!\n");
    std::printf("256x(512->512), L=16        %10.1f %10.1f %7.2fx\n", t1 - t0, t2 - t1,
                (t1 - t0) / (t2 - t1));
}

void bench_expectation() {
    RandomStream rng(4);
    HwParams hw;
    hw.crossbar_size = 16;
    hw.bitstream_length = 16;
    hw.buffer.delta_i_in = 2.4;
    hw.att = AttenuationModel{70.0, 1.9};

    BinLayer bin;
    bin.kind = BinLayer::Kind::dense;
    bin.w_r = random_matrix(512, 512, rng);
    bin.alpha.assign(512, 1.0f);
    bin.bn = BnParams::identity(512);

    Matrix acts(1024, 512);
    for (auto& v : acts.data) v = rng.bernoulli(0.5) ? 1.0f : -1.0f;

    std::printf("\n%-28s %10s\n", "expectation readout", "omp ms");
    const double t0 = now_ms();
    const Matrix e = bin_block_expectation(bin, acts, hw);
    const double t1 = now_ms();
    std::printf("1024x(512->512)             %10.1f   (checksum %g)\n", t1 - t0,
                static_cast<double>(e.data[0]));
}

} // namespace

int main() {
    std::printf("threads: %d\n\n", omp_get_max_threads());
    bench_matmul();
    bench_simulate();
    bench_expectation();
    return 0;
}
