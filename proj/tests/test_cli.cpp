// End-to-end checks of the cfmmrisk binary: subcommand output, CSV schemas,
// exit codes, and manifest reproducibility.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(CFMMRISK_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("cfmmrisk_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const fs::path& p) {
    Csv csv;
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            csv.comments.push_back(line);
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) csv.header.push_back(cell);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

}  // namespace

TEST_CASE("zones reports the reference boundaries") {
    const RunResult r = run("zones --gamma1 0.997 --gamma2 1 --x 997348 --y 3751882");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("1.009036108") != std::string::npos);
    CHECK(r.output.find("0.991044811") != std::string::npos);
    CHECK(r.output.find("closed-form") != std::string::npos);
    CHECK(r.output.find("3001.047") != std::string::npos);
}

TEST_CASE("zones degenerate and numeric modes") {
    const RunResult zero = run("zones --gamma1 1 --gamma2 1 --x 1000 --y 1000");
    CHECK(zero.exit_code == 0);
    CHECK(zero.output.find("tau:           1\n") != std::string::npos);

    const RunResult bal =
        run("zones --pool balancer --wx 0.2 --wy 0.8 --gamma1 0.997 --gamma2 1 --x 100000 --y 400000");
    CHECK(bal.exit_code == 0);
    CHECK(bal.output.find("numeric") != std::string::npos);

    const RunResult bad = run("zones --gamma1 0.997 --gamma2 0.4 --x 1000 --y 1000");
    CHECK(bad.exit_code != 0);

    // unbounded IG zone is a distinguished outcome, not an error
    const RunResult unbounded = run(
        "zones --pool balancer --wx 0.2 --wy 0.8 --gamma1 1 --gamma2 0.5001 --x 1000 --y 4000");
    CHECK(unbounded.exit_code == 0);
    CHECK(unbounded.output.find("unbounded") != std::string::npos);
}

TEST_CASE("profit-curve emits the figure schema with the right zero crossings") {
    const fs::path out = temp_dir() / "curve.csv";
    const RunResult r = run("profit-curve --gamma1 0.997 --gamma2 1 --x 997348 --y 3751882 "
                            "--ratio-min 0.98 --ratio-max 1.02 --steps 2001 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const Csv csv = parse_csv(out);
    REQUIRE(csv.header == std::vector<std::string>{"price", "lp_profit", "arb_profit"});
    REQUIRE(csv.rows.size() == 2001);

    // sign changes of the LP profit, ignoring the exact-zero band plateau
    std::vector<double> crossings;
    int last_sign = 0;
    for (const auto& row : csv.rows) {
        const int sign = row[1] > 0.0 ? 1 : (row[1] < 0.0 ? -1 : 0);
        if (sign != 0 && last_sign != 0 && sign != last_sign) crossings.push_back(row[0]);
        if (sign != 0) last_sign = sign;
        CHECK(row[2] >= 0.0);  // arbitrageur never loses
    }
    REQUIRE(crossings.size() == 2);
    CHECK(crossings[0] == doctest::Approx(0.991045).epsilon(2e-4));
    CHECK(crossings[1] == doctest::Approx(1.009036).epsilon(2e-4));

    // at parity both profits vanish
    for (const auto& row : csv.rows)
        if (row[0] == 1.0) {
            CHECK(row[1] == 0.0);
            CHECK(row[2] == 0.0);
        }
}

TEST_CASE("pil prints the analytic numbers and the Monte Carlo check") {
    const RunResult r = run("pil --gamma1 0.997 --gamma2 1 --sigma 0.0027 --verify 100000 --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.0132") != std::string::npos);
    CHECK(r.output.find("monte carlo") != std::string::npos);

    const RunResult bad = run("pil --gamma1 0.997 --gamma2 1 --sigma 0.0027 --start 1.5");
    CHECK(bad.exit_code != 0);
    CHECK(bad.output.find("error") != std::string::npos);
}

TEST_CASE("first-il emits the cdf schema with a dominating theory column") {
    const fs::path out = temp_dir() / "cdf.csv";
    const RunResult r = run("first-il --gamma1 0.997 --gamma2 1 --sigma 0.0027 "
                            "--trajectories 500 --blocks 300 --seed 5 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const Csv csv = parse_csv(out);
    REQUIRE(csv.header == std::vector<std::string>{"x", "theory", "exp_prob", "sim"});
    REQUIRE(csv.rows.size() == 300);
    for (const auto& row : csv.rows) {
        CHECK(row[1] >= row[3]);             // bound curve dominates the simulation
        CHECK(row[3] >= 0.0);
        CHECK(row[3] <= 1.0);
    }
}

TEST_CASE("min-fee emits monotone fee curves") {
    const fs::path out = temp_dir() / "fees.csv";
    const RunResult r = run("min-fee --xi 0.05 --sigma-grid 0.001,0.002,0.004 --draws 20000 "
                            "--seed 3 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const Csv csv = parse_csv(out);
    REQUIRE(csv.header ==
            std::vector<std::string>{"std", "fees_uniswap", "fees_balancer", "fees_th"});
    REQUIRE(csv.rows.size() == 3);
    for (std::size_t c = 1; c <= 3; ++c)
        for (std::size_t i = 1; i < csv.rows.size(); ++i)
            CHECK(csv.rows[i][c] >= csv.rows[i - 1][c]);
}

TEST_CASE("simulate writes ledgers, a twin, and the zone histogram") {
    const fs::path out = temp_dir() / "sim.csv";
    const RunResult r = run("simulate --gamma1 0.997 --gamma2 1 --x 997348 --y 3751882 "
                            "--sigma 0.0027 --blocks 3000 --seed 9 --compare-zero-fee --out " +
                            out.string());
    REQUIRE(r.exit_code == 0);

    const Csv fee = parse_csv(out);
    const Csv zero = parse_csv(temp_dir() / "sim_zero.csv");
    REQUIRE(fee.header ==
            std::vector<std::string>{"block_no", "total_profit", "IL", "arb_profit"});
    REQUIRE(fee.rows.size() == 3000);
    REQUIRE(zero.rows.size() == 3000);
    // cumulative LP profit: fee pool ends at least as well off as the twin
    CHECK(fee.rows.back()[2] >= zero.rows.back()[2]);
    CHECK(zero.rows.back()[2] <= 0.0);

    // histogram: the no-arb bucket dominates every trading bucket
    std::ifstream hist(temp_dir() / "sim_zones.csv");
    REQUIRE(hist.good());
    std::string line;
    long no_arb = -1, max_trading = 0, total = 0;
    while (std::getline(hist, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("bucket", 0) == 0) continue;
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        const long count = std::stol(line.substr(comma + 1));
        total += count;
        if (line.rfind("no_arb", 0) == 0)
            no_arb = count;
        else
            max_trading = std::max(max_trading, count);
    }
    CHECK(total == 3000);
    CHECK(no_arb > 2 * max_trading);
}

TEST_CASE("simulate with zero volatility puts every block in the no-arb bucket") {
    const fs::path out = temp_dir() / "flat.csv";
    const RunResult r = run("simulate --gamma1 0.997 --gamma2 1 --sigma 0 --blocks 100 --out " +
                            out.string());
    REQUIRE(r.exit_code == 0);
    const std::string hist = slurp(temp_dir() / "flat_zones.csv");
    CHECK(hist.find("no_arb,100") != std::string::npos);
    CHECK(hist.find("ig_high,0") != std::string::npos);
    CHECK(hist.find("il_low,0") != std::string::npos);
}

TEST_CASE("estimate-vol recovers synthetic parameters and rejects bad input") {
    // synthetic GBM series at sigma=0.0027 per block, 12 s blocks
    const fs::path prices = temp_dir() / "prices.csv";
    {
        std::ofstream f(prices);
        f << "timestamp,price\n";
        double p = 100.0;
        std::uint64_t state = 88172645463325252ULL;  // xorshift64
        for (int i = 0; i < 10000; ++i) {
            f << (1700000000 + 12 * i) << "," << p << "\n";
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            // crude uniform pair -> normal via Box-Muller for test data only
            const double u1 = (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            const double u2 = (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;
            const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
            p *= std::exp(-0.5 * 0.0027 * 0.0027 + 0.0027 * z);
        }
    }
    const RunResult r = run("estimate-vol --prices " + prices.string() + " --block-seconds 12");
    CHECK(r.exit_code == 0);
    const std::size_t pos = r.output.find("sigma per block:  ");
    REQUIRE(pos != std::string::npos);
    const double sigma = std::stod(r.output.substr(pos + 18));
    CHECK(sigma == doctest::Approx(0.0027).epsilon(0.10));

    // constant series: zero volatility and drift
    const fs::path flat = temp_dir() / "flat_prices.csv";
    {
        std::ofstream f(flat);
        f << "timestamp,price\n";
        for (int i = 0; i < 50; ++i) f << (1000 + i) << ",42.0\n";
    }
    const RunResult rf = run("estimate-vol --prices " + flat.string());
    CHECK(rf.exit_code == 0);
    CHECK(rf.output.find("sigma per block:  0\n") != std::string::npos);
    CHECK(rf.output.find("mu per block:     0\n") != std::string::npos);

    // duplicate timestamp named by row
    const fs::path dup = temp_dir() / "dup.csv";
    {
        std::ofstream f(dup);
        f << "timestamp,price\n";
        for (int i = 0; i < 20; ++i) f << (1000 + i) << ",1.0\n";
        f << "1019,1.0\n";  // duplicate of row 21
        for (int i = 21; i < 40; ++i) f << (1000 + i) << ",1.0\n";
    }
    const RunResult rd = run("estimate-vol --prices " + dup.string());
    CHECK(rd.exit_code != 0);
    CHECK(rd.output.find("row 22") != std::string::npos);

    // too short
    const fs::path tiny = temp_dir() / "tiny.csv";
    {
        std::ofstream f(tiny);
        f << "timestamp,price\n1,1\n2,1\n";
    }
    CHECK(run("estimate-vol --prices " + tiny.string()).exit_code != 0);
}

TEST_CASE("manifest reruns are byte-identical") {
    const fs::path a = temp_dir() / "rep_a.csv";
    const std::string args = "profit-curve --gamma1 0.997 --gamma2 1 --x 997348 --y 3751882 "
                             "--ratio-min 0.99 --ratio-max 1.01 --steps 101 --out ";
    REQUIRE(run(args + a.string()).exit_code == 0);
    const std::string first = slurp(a);
    REQUIRE(run(args + a.string()).exit_code == 0);
    CHECK(first == slurp(a));

    // replaying the embedded manifest command reproduces the bytes exactly
    std::string manifest = first.substr(2, first.find('\n') - 2);  // strip "# "
    REQUIRE(manifest.rfind("cfmmrisk ", 0) == 0);
    const fs::path b = temp_dir() / "rep_b.csv";
    std::string replay = manifest.substr(9);
    const std::string marker = "--out ";
    replay.replace(replay.find(marker) + marker.size(), std::string::npos, b.string());
    REQUIRE(run(replay).exit_code == 0);
    std::string second = slurp(b);
    // normalize the embedded output path before comparing
    const std::size_t pa = first.find(a.string());
    const std::size_t pb = second.find(b.string());
    REQUIRE(pa != std::string::npos);
    REQUIRE(pb != std::string::npos);
    std::string norm_first = first;
    norm_first.replace(pa, a.string().size(), "OUT");
    std::string norm_second = second;
    norm_second.replace(pb, b.string().size(), "OUT");
    CHECK(norm_first == norm_second);
}

TEST_CASE("config file supplies defaults") {
    const fs::path cfg = temp_dir() / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "gamma1=0.997\ngamma2=1\nx=997348\ny=3751882\n";
    }
    const RunResult r = run("zones --config " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("1.009036108") != std::string::npos);
}
