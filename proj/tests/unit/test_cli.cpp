#include "divergent/cli/commands.hpp"
#include "divergent/errors.hpp"
#include "divergent/experiment/run.hpp"
#include "divergent/maze/maze.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace divergent;
using namespace divergent::cli;

namespace {

const fs::path data_dir = DIVERGENT_DATA_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("divergent_test_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

ConfigSource tiny_source(std::uint64_t seed = 1)
{
    ConfigSource s;
    s.maze = data_dir / "mazes/medium.maze";
    s.strategy = "surprise";
    s.seed = seed;
    s.overrides = {{"neat.population_size", "20"}, {"experiment.generations", "4"}, {"experiment.steps", "80"},
                   {"strategy.k", "4"}};
    return s;
}

} // namespace

TEST_CASE("parse_grid")
{
    const auto g = parse_grid("k=5,10;n=1..3");
    REQUIRE(g.size() == 6);
    CHECK(g[0] == std::pair{5, 1});
    CHECK(g[2] == std::pair{5, 3});
    CHECK(g[3] == std::pair{10, 1});
    CHECK(parse_grid("n=2;k=10..30/10") == std::vector<std::pair<int, int>>{{10, 2}, {20, 2}, {30, 2}});
    CHECK_THROWS_AS(parse_grid("k=5"), ConfigError);
    CHECK_THROWS_AS(parse_grid("k=0;n=1"), ConfigError);
    CHECK_THROWS_AS(parse_grid("k=5;n=x"), ConfigError);
    CHECK_THROWS_AS(parse_grid("k=5;n=3..1"), ConfigError);
    CHECK_THROWS_AS(parse_grid("k=5;m=1"), ConfigError);
}

TEST_CASE("manifest parsing")
{
    const auto m = parse_manifest("# batch\noutput = out\nworkers = 2\nrun = a.cfg 1-3\nrun = b.cfg 7\n", "/base");
    CHECK(m.output == fs::path("/base/out"));
    CHECK(m.workers == 2);
    REQUIRE(m.runs.size() == 4);
    CHECK(m.runs[0].config == fs::path("/base/a.cfg"));
    CHECK(m.runs[2].seed == 3);
    CHECK(m.runs[3].seed == 7);
    CHECK_THROWS_AS(parse_manifest("", "/"), ConfigError);
    CHECK_THROWS_AS(parse_manifest("run = a.cfg 1\nrun = a.cfg 1\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_manifest("run = a.cfg 5-2\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_manifest("run = a.cfg\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_manifest("bogus = 1\nrun = a.cfg 1\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_manifest("workers = 0\nrun = a.cfg 1\n", "/"), ConfigError);
}

TEST_CASE("resolve_config")
{
    const auto c = resolve_config(tiny_source(9));
    CHECK(c.seed == 9);
    CHECK(c.neat.population_size == 20);
    CHECK(c.strategy.kind == search::StrategyKind::surprise);

    ConfigSource file;
    file.config = data_dir / "../configs/hard_novelty.cfg";
    file.seed = 4;
    const auto h = resolve_config(file);
    CHECK(h.strategy.kind == search::StrategyKind::novelty);
    CHECK(h.strategy.n == 15);
    CHECK(h.seed == 4);
    CHECK(h.maze.width == 200);

    CHECK_THROWS_AS(resolve_config(ConfigSource{}), ConfigError);
}

TEST_CASE("run command")
{
    TempDir dir("run");
    std::ostringstream out;
    std::ostringstream err;
    RunOptions opts{tiny_source(3), dir.path};
    REQUIRE(cmd_run(opts, out, err) == 0);
    CHECK(out.str().find("seed 3") != std::string::npos);
    const auto csv = dir.path / "medium_surprise_seed3.csv";
    REQUIRE(fs::exists(csv));
    CHECK(fs::exists(dir.path / "medium_surprise_seed3.genome"));
    CHECK(fs::exists(dir.path / "medium_surprise_seed3_behaviours.csv"));
    const auto first = slurp(csv);
    const auto record = experiment::parse_run_csv(first);
    CHECK(record.generations.size() == 4);

    REQUIRE(cmd_run(opts, out, err) == 0);
    CHECK(slurp(csv) == first);

    SUBCASE("missing maze names its path")
    {
        RunOptions bad{tiny_source(), dir.path};
        bad.source.maze = "/no/where/lost.maze";
        std::ostringstream e;
        CHECK(cmd_run(bad, out, e) == 1);
        CHECK(e.str().find("/no/where/lost.maze") != std::string::npos);
    }
    SUBCASE("invalid override names its key")
    {
        RunOptions bad{tiny_source(), dir.path};
        bad.source.overrides.emplace_back("strategy.k", "-3");
        std::ostringstream e;
        CHECK(cmd_run(bad, out, e) == 1);
        CHECK(e.str().find("strategy.k") != std::string::npos);
    }
}

TEST_CASE("batch command")
{
    TempDir dir("batch");
    spit(dir.path / "tiny.cfg", "[experiment]\nmaze = " + (data_dir / "mazes/medium.maze").string() +
                                    "\ngenerations = 3\nsteps = 60\n[neat]\npopulation_size = 20\n[strategy]\n"
                                    "kind = novelty\n");
    spit(dir.path / "broken.cfg", "[experiment]\nmaze = nowhere.maze\n");
    spit(dir.path / "b.manifest", "output = results\nrun = tiny.cfg 1-2\nrun = broken.cfg 1\n");
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_batch({dir.path / "b.manifest", std::nullopt, 2}, out, err) == 1);
    CHECK(err.str().find("broken") != std::string::npos);
    const auto res = dir.path / "results";
    CHECK(fs::exists(res / "tiny_seed1.csv"));
    CHECK(fs::exists(res / "tiny_seed2.csv"));
    CHECK(fs::exists(res / "tiny_efficiency.csv"));
    CHECK(fs::exists(res / "tiny_robustness.csv"));
    CHECK(fs::exists(res / "tiny_heatmap.pgm"));
    const auto summary = slurp(res / "summary.csv");
    CHECK(summary.rfind("config,seed,maze,strategy,solved,", 0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') >= 3);
}

TEST_CASE("generate command")
{
    TempDir dir("generate");
    std::ostringstream out;
    std::ostringstream err;
    GenerateOptions opts;
    opts.count = 3;
    opts.seed = 11;
    opts.out = dir.path / "suite";
    REQUIRE(cmd_generate(opts, out, err) == 0);
    const auto list = load_maze_list(opts.out / "manifest.txt");
    REQUIRE(list.size() == 3);
    CHECK(list[0].filename() == "gen_01.maze");
    for (const auto& p : list)
        CHECK(maze::check(maze::load_maze_file(p)).empty());

    // A prefix of the suite is the same maze.
    GenerateOptions one = opts;
    one.count = 1;
    one.out = dir.path / "one";
    REQUIRE(cmd_generate(one, out, err) == 0);
    CHECK(slurp(one.out / "gen_01.maze") == slurp(opts.out / "gen_01.maze"));

    SUBCASE("unwritable destination")
    {
        spit(dir.path / "file", "x");
        GenerateOptions bad = opts;
        bad.out = dir.path / "file" / "sub";
        std::ostringstream e;
        CHECK(cmd_generate(bad, out, e) == 1);
        CHECK(e.str().find("file") != std::string::npos);
    }
    SUBCASE("bad count")
    {
        GenerateOptions bad = opts;
        bad.count = 0;
        std::ostringstream e;
        CHECK(cmd_generate(bad, out, e) == 1);
    }
    CHECK_THROWS_AS(generator_config({{"gen.colour", "red"}}), ConfigError);
    CHECK(generator_config({{"gen.hole_width", "30"}}).hole_width == 30.0);
}

TEST_CASE("sensitivity command")
{
    TempDir dir("sensitivity");
    std::ostringstream out;
    std::ostringstream err;
    SensitivityOptions opts;
    opts.source = tiny_source();
    opts.grid = "k=2,4;n=1,2";
    opts.runs = 2;
    opts.out = dir.path;
    REQUIRE(cmd_sensitivity(opts, out, err) == 0);
    const auto sweep = slurp(dir.path / "sweep.csv");
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 5);
    CHECK(out.str().find("selected k=") != std::string::npos);

    opts.runs = 0;
    std::ostringstream e;
    CHECK(cmd_sensitivity(opts, out, e) == 1);
    CHECK(e.str().find("runs") != std::string::npos);
}
