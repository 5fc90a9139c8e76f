#include <filesystem>
#include <functional>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "pcstar/config.hpp"
#include "pcstar/io.hpp"

using namespace pcstar;
using nlohmann::json;
using testutil::make_dag;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "pcstar_io_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Io, NetworkRoundTrip) {
    Rng rng(4);
    std::vector<Variable> vars = make_variables(4);
    vars[2].arity = 3;
    Dag dag(vars);
    dag.add_edge(0, 2);
    dag.add_edge(1, 2);
    dag.add_edge(2, 3);
    const auto bn = sample_uniform_parameters(dag, rng);
    const auto path = scratch("net.json");
    io::write_network(path, bn);
    const auto back = io::read_network(path);
    EXPECT_EQ(back.dag(), bn.dag());
    for (int v = 0; v < 4; ++v) {
        const auto a = bn.cpt(v).table(), b = back.cpt(v).table();
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i], b[i]);
    }
}

TEST(Io, NetworkRejectsBadColumns) {
    auto j = io::network_to_json(BayesNet(make_dag(2, {{0, 1}})));
    const auto text = j.dump();
    auto broken = json::parse(text);
    // Flip one probability so its column no longer sums to one.
    std::function<bool(json&)> poke = [&](json& node) {
        if (node.is_number_float() && node.get<double>() == 0.5) {
            node = 0.9;
            return true;
        }
        if (node.is_structured()) {
            for (auto& child : node) {
                if (poke(child)) return true;
            }
        }
        return false;
    };
    ASSERT_TRUE(poke(broken));
    EXPECT_THROW(io::network_from_json(broken), Error);
}

TEST(Io, DatasetCsvRoundTrip) {
    const auto data = testutil::make_data(3, {{0, 1, 1}, {1, 0, 0}});
    const auto text = io::dataset_to_csv(data);
    EXPECT_EQ(text, "X0,X1,X2\n0,1,1\n1,0,0\n");
    EXPECT_EQ(io::dataset_from_csv(text), data);
}

TEST(Io, CsvArityInference) {
    const auto data = io::dataset_from_csv("a,b\n0,2\n1,0\n");
    EXPECT_EQ(data.variables()[0].arity, 2);
    EXPECT_EQ(data.variables()[1].arity, 3);
    EXPECT_EQ(io::dataset_from_csv("a,b\n").rows(), 0u);
}

TEST(Io, CsvErrors) {
    EXPECT_THROW(io::dataset_from_csv(""), Error);
    EXPECT_THROW(io::dataset_from_csv("a,b\n0\n"), Error);
    EXPECT_THROW(io::dataset_from_csv("a,b\n0,x\n"), Error);
    EXPECT_THROW(io::dataset_from_csv("a,b\n0,-1\n"), Error);
}

TEST(Io, PatternRoundTripAndDot) {
    auto p = pattern_of_dag(make_dag(4, {{0, 2}, {1, 2}, {2, 3}, {0, 1}}));
    EXPECT_EQ(io::pattern_from_json(io::pattern_to_json(p)), p);
    const auto dot = io::pattern_to_dot(pattern_of_dag(make_dag(2, {{0, 1}})));
    EXPECT_NE(dot.find("\"X0\" -> \"X1\" [dir=none];"), std::string::npos);
}

TEST(Io, AtomicWriteReplaces) {
    const auto path = scratch("atomic.txt");
    io::write_atomic(path, "one");
    io::write_atomic(path, "two");
    EXPECT_EQ(io::read_file(path), "two");
    EXPECT_THROW(io::read_file(scratch("missing.txt")), io::IoError);
}

TEST(Config, ExperimentGrid) {
    const auto cfgs = config::experiments_from_json(json::parse(R"({"N": [10, 20], "N_r": [50, 100], "trials": 5, "seed": 3,
                                                                    "methods": ["pc", "gtt"]})"));
    ASSERT_EQ(cfgs.size(), 4u);
    EXPECT_EQ(cfgs[1].nodes, 10u);
    EXPECT_EQ(cfgs[1].records, 100u);
    EXPECT_EQ(cfgs[0].trials, 5u);
    EXPECT_TRUE(cfgs[0].uses(bench::Method::pcstar));
    EXPECT_TRUE(cfgs[0].uses(bench::Method::gtt));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(config::experiments_from_json(json::parse(R"({"N": 10, "N_r": 50, "bogus": 1})")), config::ConfigError);
    EXPECT_THROW(config::experiments_from_json(json::parse(R"({"N": 10, "N_r": 50, "alpha": 2})")), config::ConfigError);
    EXPECT_THROW(config::experiments_from_json(json::parse(R"({"N": "ten", "N_r": 50})")), config::ConfigError);
    EXPECT_THROW(config::experiments_from_json(json::parse(R"({"N": 10, "N_r": 50, "methods": ["x"]})")), config::ConfigError);
    EXPECT_THROW(config::stall_from_json(json::parse(R"({"grid": []})")), config::ConfigError);
    EXPECT_THROW(config::alpha_sweep_from_json(json::parse(R"({"alphas": [0.05, 1.0]})")), config::ConfigError);
}

TEST(Config, StallAndSweep) {
    const auto s = config::stall_from_json(json::parse(R"({"N": [40], "N_r": [100, 400], "trials": 10})"));
    EXPECT_EQ(s.grid.size(), 2u);
    EXPECT_EQ(s.grid[1], (std::pair<std::size_t, std::size_t>{40, 400}));
    const auto a = config::alpha_sweep_from_json(json::parse(R"({"N": 8, "alphas": [0.01]})"));
    EXPECT_EQ(a.nodes, 8u);
    EXPECT_EQ(a.alphas, (std::vector<double>{0.01}));
    EXPECT_FALSE(a.pcstar_alpha);
}
