#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "csifb/binio.hpp"
#include "csifb/cli.hpp"
#include "csifb/dataset.hpp"
#include "csifb/efnet_train.hpp"
#include "csifb/schemes.hpp"

using namespace csifb;

namespace {
namespace fs = std::filesystem;

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("csifb_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string path(const char* name) const { return (dir / name).string(); }
};

RunConfig tiny_config() {
    RunConfig cfg = RunConfig::defaults();
    cfg.channel.nt = 2;
    cfg.channel.nr = 2;
    cfg.channel.n_fft = 16;
    cfg.channel.n_vs = 8;
    cfg.channel.n_taps = 2;
    cfg.channel.seed = 11;
    cfg.n_samples = 40;
    cfg.efnet.m = 4;
    cfg.efnet.conv_channels = 4;
    cfg.efnet.epochs = 3;
    cfg.efnet.batch_size = 8;
    cfg.efnet.seed = 11;
    cfg.threads = 2;
    cfg.tput.n_cp = 4;
    cfg.evm.n_symbols = 4;
    cfg.sync_derived();
    return cfg;
}
}  // namespace

TEST_CASE("run config: json round trip and validation") {
    TempDir tmp;
    RunConfig cfg = tiny_config();
    cfg.tput.t_fixed_s = 142.1e-6;
    {
        std::ofstream f(tmp.path("cfg.json"));
        f << cfg.to_json();
    }
    RunConfig back = RunConfig::from_json_file(tmp.path("cfg.json"));
    CHECK(back.channel.nt == 2);
    CHECK(back.channel.n_vs == 8);
    CHECK(back.efnet.m == 4);
    CHECK(back.efnet.n_vs == 8);  // derived sync
    CHECK(back.tput.t_fixed_s == doctest::Approx(142.1e-6));
    back.validate();

    {
        std::ofstream f(tmp.path("bad.json"));
        f << R"({"chanel": {"nt": 2}})";  // typo must be rejected
    }
    CHECK_THROWS_AS(RunConfig::from_json_file(tmp.path("bad.json")), ConfigError);

    {
        std::ofstream f(tmp.path("notjson.json"));
        f << "not json";
    }
    CHECK_THROWS_AS(RunConfig::from_json_file(tmp.path("notjson.json")), ConfigError);

    RunConfig bad_ns = tiny_config();
    bad_ns.ns = 5;  // > min(nr, nt): rejected before any I/O
    bad_ns.sync_derived();
    CHECK_THROWS_AS(bad_ns.validate(), ConfigError);
}

TEST_CASE("gen-data: split printout and byte-identical reruns") {
    TempDir tmp;
    RunConfig cfg = tiny_config();
    std::ostringstream log;
    cmd_gen_data(cfg, tmp.path("a.bin"), log);
    CHECK(log.str().find("split 32/4/4") != std::string::npos);

    std::ostringstream log2;
    cmd_gen_data(cfg, tmp.path("b.bin"), log2);
    CHECK(read_file_bytes(tmp.path("a.bin")) == read_file_bytes(tmp.path("b.bin")));
    CHECK(fs::exists(tmp.path("a.bin.meta.json")));

    Dataset d = load_dataset(tmp.path("a.bin"));
    CHECK(d.images.size() == 40);
}

TEST_CASE("train + eval + compare pipeline") {
    TempDir tmp;
    RunConfig cfg = tiny_config();
    std::ostringstream log;
    cmd_gen_data(cfg, tmp.path("data.bin"), log);

    cmd_train(cfg, tmp.path("data.bin"), tmp.path("model.bin"), tmp.path("log.csv"), {}, log);
    CHECK(fs::exists(tmp.path("model.bin")));
    EfnetModel model = load_model(tmp.path("model.bin"));
    CHECK(model.config.m == 4);

    // log CSV row count = epochs (+ header)
    std::ifstream f(tmp.path("log.csv"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++lines;
    CHECK(lines == cfg.efnet.epochs + 1);

    cmd_eval(cfg, tmp.path("data.bin"), tmp.path("model.bin"),
             {"T0G1", "T0G2", "Perfect", "EFNet", "fixed:LB-SciFi:136:-14.38"},
             tmp.path("report.csv"), tmp.path("dump.bin"), log);
    auto rows = read_report_csv(tmp.path("report.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].scheme == "T0G1");
    CHECK(rows[0].overhead_bits == 8 * 12);  // 8 subcarriers, 12 bits each
    CHECK(rows[2].rho == doctest::Approx(1.0));
    CHECK(rows[3].scheme == "EFNet");
    CHECK(rows[3].overhead_bits == 16);  // m=4, q=4
    CHECK(fs::exists(tmp.path("report.csv.meta.json")));
    CHECK(fs::exists(tmp.path("dump.bin")));

    // merging a report with itself yields the same rows once
    std::ostringstream clog;
    cmd_compare({tmp.path("report.csv"), tmp.path("report.csv")}, tmp.path("merged.csv"), clog);
    std::ifstream m(tmp.path("merged.csv"));
    std::size_t merged_rows = 0;
    while (std::getline(m, line))
        if (!line.empty()) ++merged_rows;
    CHECK(merged_rows == 6);  // header + 5 unique rows

    // differing t_fixed between reports draws a warning
    RunConfig cfg2 = cfg;
    cfg2.tput.t_fixed_s = 99e-6;
    cmd_eval(cfg2, tmp.path("data.bin"), "", {"Perfect"}, tmp.path("report2.csv"), "", log);
    std::ostringstream wlog;
    cmd_compare({tmp.path("report.csv"), tmp.path("report2.csv")}, "", wlog);
    CHECK(wlog.str().find("different t_fixed") != std::string::npos);
}

TEST_CASE("eval: catches config/dataset mismatch and missing model") {
    TempDir tmp;
    RunConfig cfg = tiny_config();
    std::ostringstream log;
    cmd_gen_data(cfg, tmp.path("data.bin"), log);

    RunConfig wrong_seed = cfg;
    wrong_seed.channel.seed = 999;
    CHECK_THROWS_AS(cmd_eval(wrong_seed, tmp.path("data.bin"), "", {"Perfect"},
                             tmp.path("r.csv"), "", log),
                    ConfigError);

    CHECK_THROWS_AS(
        cmd_eval(cfg, tmp.path("data.bin"), "", {"EFNet"}, tmp.path("r.csv"), "", log),
        ConfigError);

    CHECK_THROWS_AS(cmd_eval(cfg, tmp.path("missing.bin"), "", {"Perfect"}, tmp.path("r.csv"),
                             "", log),
                    IoError);
}

TEST_CASE("gen-data: csv ingestion path") {
    TempDir tmp;
    {
        std::ofstream f(tmp.path("csi.csv"));
        // 12 samples x 2 subcarriers, nr=1, nt=2
        for (int s = 0; s < 12; ++s)
            for (int k = 0; k < 2; ++k)
                f << 0.1 * s << "," << 0.01 * k << "," << 0.5 - 0.01 * s << "," << 0.2 << "\n";
    }
    RunConfig cfg = RunConfig::defaults();
    cfg.channel.nt = 2;
    cfg.channel.nr = 1;
    cfg.channel.n_vs = 2;
    cfg.channel.n_fft = 2;
    cfg.tput.n_cp = 1;
    cfg.csv_path = tmp.path("csi.csv");
    cfg.sync_derived();
    std::ostringstream log;
    cmd_gen_data(cfg, tmp.path("ing.bin"), log);
    Dataset d = load_dataset(tmp.path("ing.bin"));
    CHECK(d.images.size() == 12);
    CHECK(d.nt == 2);
    CHECK(d.n_vs == 2);
}
