// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "antsel/channel_geometry.hpp"
#include "antsel/errors.hpp"
#include "antsel/receivers.hpp"
#include "antsel/selection.hpp"

using namespace antsel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

using Indices = std::vector<std::size_t>;

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

ComplexMatrix random_symbols(std::size_t L, std::size_t T, std::uint64_t seed)
{
    rng::CounterRng gen(seed, 0, rng::Stream::symbols);
    std::vector<Complex> entries(L * T);
    for (Complex& z : entries)
        z = qpsk::modulate(gen.next_u32() & 3u);
    return ComplexMatrix(L, T, entries);
}

// Received block without noise: amplitude * H_s * S.
ComplexMatrix noiseless(const ComplexMatrix& hs, const ComplexMatrix& s, const LinkBudget& budget)
{
    return ComplexMatrix(Eigen::MatrixXcd(budget.amplitude() * (hs.eigen() * s.eigen())));
}

double height_against(const ComplexMatrix& hs, std::size_t k, const Indices& others)
{
    return others.empty() ? hs.column(k).squaredNorm() : projection_height_sq(hs, k, others).height_sq;
}

} // namespace

TEST_CASE("receiver, feedback and ordering names round-trip", "[receivers]")
{
    for (Receiver r : {Receiver::zf, Receiver::mmse, Receiver::df_zf, Receiver::df_mmse})
        CHECK(parse_receiver(receiver_name(r)) == r);
    for (Feedback f : {Feedback::actual, Feedback::genie})
        CHECK(parse_feedback(feedback_name(f)) == f);
    for (Ordering o : {Ordering::fixed, Ordering::vblast, Ordering::qr_reverse})
        CHECK(parse_ordering(ordering_name(o)) == o);
    CHECK_THROWS_AS(parse_receiver("ml"), ArgumentError);
    CHECK(is_decision_feedback(Receiver::df_mmse));
    CHECK_FALSE(is_decision_feedback(Receiver::mmse));
    CHECK(front_end(Receiver::df_mmse) == Equalizer::mmse);
    CHECK_THROWS_AS(LinkBudget(0.0, 2), ArgumentError);
}

TEST_CASE("QPSK Gray mapping", "[receivers]")
{
    for (unsigned label = 0; label < 4; ++label)
    {
        const Complex z = qpsk::modulate(label);
        CHECK_THAT(std::norm(z), WithinAbs(1.0, 1e-15));
        CHECK(qpsk::demodulate(z) == label);
        CHECK(qpsk::slice(z * 0.3) == z);
    }
    // neighbours differ in one bit
    CHECK(qpsk::demodulate({1, 1}) == 0u);
    CHECK(qpsk::demodulate({-1, 1}) == 1u);
    CHECK(qpsk::demodulate({1, -1}) == 2u);
    CHECK_THAT(qpsk::bit_error_probability(4.0), WithinRel(q_function(2.0), 1e-12));
    CHECK_THAT(qpsk::symbol_error_probability(4.0), WithinRel(2 * q_function(2.0) - std::pow(q_function(2.0), 2), 1e-12));
}

TEST_CASE("ZF post-processing SNR", "[receivers]")
{
    const LinkBudget budget(10.0, 2);
    SECTION("orthonormal columns")
    {
        for (double s : zf_post_snr(ComplexMatrix::from_columns({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}), budget).snrs)
            CHECK_THAT(s, WithinAbs(5.0, 1e-12));
    }
    SECTION("45 degree columns")
    {
        const double r = 1.0 / std::sqrt(2.0);
        for (double s : zf_post_snr(ComplexMatrix::from_columns({{1.0, 0.0}, {r, r}}), budget).snrs)
            CHECK_THAT(s, WithinRel(2.5, 1e-12));
    }
    SECTION("Gram-inverse route equals projection route across dimensions")
    {
        std::uint64_t t = 0;
        for (std::size_t n_r = 2; n_r <= 5; ++n_r)
            for (std::size_t L = 2; L <= std::min<std::size_t>(4, n_r); ++L)
                for (int rep = 0; rep < 25; ++rep, ++t)
                {
                    const ComplexMatrix hs = sample_channel(n_r, L, 21, t).matrix;
                    const LinkBudget b(7.0, L);
                    const StreamSnrReport report = zf_post_snr(hs, b);
                    REQUIRE(report.receiver == Receiver::zf);
                    for (std::size_t k = 0; k < L; ++k)
                    {
                        Indices others;
                        for (std::size_t j = 0; j < L; ++j)
                            if (j != k)
                                others.push_back(j);
                        REQUIRE_THAT(report.snrs[k],
                                     WithinRel(b.stream_snr() * projection_height_sq(hs, k, others).height_sq, 1e-9));
                    }
                }
    }
    SECTION("singular channel")
    {
        CHECK_THROWS_AS(zf_post_snr(ComplexMatrix::from_columns({{1.0, 1.0}, {2.0, 2.0}}), budget), SingularityError);
    }
}

TEST_CASE("MMSE post-processing SNR", "[receivers]")
{
    SECTION("orthonormal columns coincide with ZF")
    {
        for (double s : mmse_post_snr(ComplexMatrix::identity(2), LinkBudget(10.0, 2)).snrs)
            CHECK_THAT(s, WithinRel(5.0, 1e-12));
    }
    SECTION("vanishing rho0")
    {
        for (double s : mmse_post_snr(sample_channel(3, 2, 1, 0).matrix, LinkBudget(1e-12, 2)).snrs)
            CHECK(s < 1e-10);
    }
    SECTION("high-SNR ratio to ZF approaches one")
    {
        const ComplexMatrix hs = sample_channel(3, 2, 1, 1).matrix;
        const LinkBudget b(1e6, 2);
        const auto m = mmse_post_snr(hs, b).snrs;
        const auto z = zf_post_snr(hs, b).snrs;
        for (std::size_t k = 0; k < 2; ++k)
            CHECK_THAT(m[k] / z[k], WithinAbs(1.0, 0.01));
    }
    SECTION("dominates ZF on every draw")
    {
        for (std::uint64_t t = 0; t < 200; ++t)
        {
            const ComplexMatrix hs = sample_channel(3, 3, 2, t).matrix;
            const LinkBudget b(3.0, 3);
            const auto m = mmse_post_snr(hs, b).snrs;
            const auto z = zf_post_snr(hs, b).snrs;
            for (std::size_t k = 0; k < 3; ++k)
                REQUIRE(m[k] >= z[k] * (1 - 1e-12));
        }
    }
}

TEST_CASE("linear detection", "[receivers]")
{
    SECTION("noiseless reception is recovered exactly")
    {
        const ComplexMatrix hs = sample_channel(4, 3, 3, 0).matrix;
        const LinkBudget b(5.0, 3);
        const ComplexMatrix s = random_symbols(3, 50, 1);
        for (Equalizer e : {Equalizer::zf, Equalizer::mmse})
            CHECK(count_symbol_errors(s, detect_linear(hs, noiseless(hs, s, b), b, e)) == 0);
    }
    SECTION("single-stream AWGN symbol errors match the closed form")
    {
        const double gamma = 4.0;
        const LinkBudget b(gamma, 1);
        const ComplexMatrix h = ComplexMatrix::identity(1);
        const std::size_t frame = 1000;
        std::uint64_t symbol_errors = 0, bit_errors = 0, symbols = 0;
        for (std::uint64_t t = 0; t < 1000; ++t)
        {
            rng::CounterRng sym(77, t, rng::Stream::symbols), noise(77, t, rng::Stream::noise);
            const SymbolFrame f = transmit_frame(h, b, frame, sym, noise);
            const ComplexMatrix d = detect_linear(h, f.received, b, Equalizer::zf);
            symbol_errors += count_symbol_errors(f.transmitted, d);
            bit_errors += count_bit_errors(f.transmitted, d);
            symbols += frame;
        }
        const double q = q_function(std::sqrt(gamma));
        const double ser = 2 * q - q * q;
        const double n = static_cast<double>(symbols);
        CHECK(std::abs(symbol_errors / n - ser) < 3 * std::sqrt(ser * (1 - ser) / n));
        CHECK(std::abs(bit_errors / (2 * n) - q) < 3 * std::sqrt(q * (1 - q) / (2 * n)));
    }
    SECTION("ZF error counts never increase with rho0 under common noise")
    {
        const ComplexMatrix hs = sample_channel(3, 2, 4, 0).matrix;
        std::size_t previous = static_cast<std::size_t>(-1);
        for (double db : {0.0, 5.0, 10.0, 15.0, 20.0})
        {
            const LinkBudget b(std::pow(10.0, db / 10.0), 2);
            rng::CounterRng sym(5, 0, rng::Stream::symbols), noise(5, 0, rng::Stream::noise);
            const SymbolFrame f = transmit_frame(hs, b, 20000, sym, noise);
            const std::size_t errors = count_bit_errors(f.transmitted, detect_linear(hs, f.received, b, Equalizer::zf));
            REQUIRE(errors <= previous);
            previous = errors;
        }
    }
}

TEST_CASE("decision-feedback detection", "[receivers]")
{
    SECTION("orthogonal columns: DF equals linear ZF")
    {
        const auto hs = ComplexMatrix::from_columns({{2.0, 0.0, 0.0}, {0.0, 0.5, 0.0}});
        const LinkBudget b(2.0, 2);
        rng::CounterRng sym(6, 0, rng::Stream::symbols), noise(6, 0, rng::Stream::noise);
        const SymbolFrame f = transmit_frame(hs, b, 5000, sym, noise);
        DfOptions options;
        options.decode_order = {1, 0};
        CHECK(detect_df(hs, f.received, b, options).row_major() ==
              detect_linear(hs, f.received, b, Equalizer::zf).row_major());
    }
    SECTION("noiseless reception is recovered in both feedback modes")
    {
        const ComplexMatrix hs = sample_channel(3, 3, 7, 0).matrix;
        const LinkBudget b(4.0, 3);
        const ComplexMatrix s = random_symbols(3, 40, 2);
        const ComplexMatrix y = noiseless(hs, s, b);
        for (Feedback fb : {Feedback::actual, Feedback::genie})
            for (Equalizer e : {Equalizer::zf, Equalizer::mmse})
            {
                DfOptions options{{2, 0, 1}, fb, e, &s};
                CHECK(count_symbol_errors(s, detect_df(hs, y, b, options)) == 0);
            }
    }
    SECTION("genie feedback requires the transmitted block and a valid order")
    {
        const ComplexMatrix hs = sample_channel(3, 2, 7, 1).matrix;
        const LinkBudget b(4.0, 2);
        const ComplexMatrix y = noiseless(hs, random_symbols(2, 4, 3), b);
        CHECK_THROWS_AS(detect_df(hs, y, b, DfOptions{{0, 1}, Feedback::genie, Equalizer::zf, nullptr}), ArgumentError);
        CHECK_THROWS_AS(detect_df(hs, y, b, DfOptions{{0, 0}, Feedback::actual, Equalizer::zf, nullptr}), ArgumentError);
    }
    SECTION("stage SNR equals the height against streams decoded later")
    {
        for (std::uint64_t t = 0; t < 100; ++t)
        {
            const ComplexMatrix hs = sample_channel(4, 3, 8, t).matrix;
            const LinkBudget b(6.0, 3);
            const Indices order{2, 0, 1};
            const StreamSnrReport report = df_post_snr(hs, b, order);
            for (std::size_t stage = 0; stage < 3; ++stage)
            {
                const Indices later(order.begin() + static_cast<std::ptrdiff_t>(stage) + 1, order.end());
                const std::size_t k = order[stage];
                REQUIRE_THAT(report.snrs[k], WithinRel(b.stream_snr() * height_against(hs, k, later), 1e-9));
            }
        }
    }
    SECTION("QR-greedy order: stage SNRs equal the squared R diagonal")
    {
        for (std::uint64_t t = 0; t < 100; ++t)
        {
            const ComplexMatrix h = sample_channel(4, 5, 9, t).matrix;
            const SelectionOutcome o = select_qr_greedy(h, 3);
            const ComplexMatrix hs = h.select_columns(o.selection_order);
            const LinkBudget b(10.0, 3);
            const StreamSnrReport report = df_post_snr(hs, b, Indices{2, 1, 0});
            const QrFactors qr = qr_factorize(hs);
            for (std::size_t k = 0; k < 3; ++k)
                REQUIRE_THAT(report.snrs[k], WithinRel(b.stream_snr() * std::norm(qr.r(k, k)), 1e-9));
        }
    }
    SECTION("MMSE front end dominates ZF stage by stage")
    {
        for (std::uint64_t t = 0; t < 100; ++t)
        {
            const ComplexMatrix hs = sample_channel(3, 3, 10, t).matrix;
            const LinkBudget b(2.0, 3);
            const Indices order{1, 2, 0};
            const auto z = df_post_snr(hs, b, order, Equalizer::zf).snrs;
            const auto m = df_post_snr(hs, b, order, Equalizer::mmse).snrs;
            for (std::size_t k = 0; k < 3; ++k)
                REQUIRE(m[k] >= z[k] * (1 - 1e-12));
        }
    }
}

TEST_CASE("V-BLAST ordering", "[receivers]")
{
    CHECK(vblast_order(ComplexMatrix::from_columns({{1.0, 0.0}, {0.0, 3.0}}), LinkBudget(1.0, 2)) == Indices{1, 0});
    CHECK(vblast_order(sample_channel(3, 1, 1, 0).matrix, LinkBudget(1.0, 1)) == Indices{0});
    for (std::uint64_t t = 0; t < 100; ++t)
    {
        const ComplexMatrix hs = sample_channel(4, 4, 11, t).matrix;
        Indices order = vblast_order(hs, LinkBudget(5.0, 4));
        // the first pick has the largest post-ZF SNR
        const auto z = zf_post_snr(hs, LinkBudget(5.0, 4)).snrs;
        REQUIRE(order.front() == static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin()));
        std::sort(order.begin(), order.end());
        REQUIRE(order == Indices{0, 1, 2, 3});
    }
}
