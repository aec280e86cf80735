#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <set>

#include "catalog.hpp"
#include "error.hpp"
#include "support/testdata.hpp"

using namespace mqp;

TEST_CASE("default catalog exposes the five sales tables") {
    const Catalog c = Catalog::load_default();
    REQUIRE(c.tables().size() == 5);
    CHECK(c.cardinality("region") == 5);
    CHECK(c.cardinality("nation") == 25);
    CHECK(c.cardinality("customer") == 150000);
    CHECK(c.cardinality("orders") == 1500000);
    CHECK(c.cardinality("lineitem") == 6001215);
}

TEST_CASE("default catalog key statistics") {
    const Catalog c = Catalog::load_default();
    CHECK(c.distinct_of("region", "r_regionkey") == 5);
    CHECK(c.distinct_of("nation", "n_nationkey") == 25);
    CHECK(c.distinct_of("nation", "n_regionkey") == 5);
    CHECK(c.distinct_of("customer", "c_custkey") == 150000);
    CHECK(c.distinct_of("customer", "c_nationkey") == 25);
    CHECK(c.distinct_of("customer", "c_name") == 150000);
    CHECK(c.distinct_of("customer", "c_acctbal") == 140187);
    CHECK(c.distinct_of("orders", "o_orderkey") == 1500000);
    CHECK(c.distinct_of("orders", "o_custkey") == 150000);
    CHECK(c.distinct_of("orders", "o_totalprice") == 1464556);
    CHECK(c.distinct_of("lineitem", "l_orderkey") == 1500000);
    CHECK(c.distinct_of("lineitem", "l_quantity") == 50);
    CHECK(c.distinct_of("lineitem", "l_discount") == 11);
    CHECK(c.distinct_of("lineitem", "l_returnflag") == 3);
    CHECK(c.distinct_of("lineitem", "l_shipmode") == 7);
}

TEST_CASE("attribute names resolve to their owning table") {
    const Catalog c = Catalog::load_default();
    CHECK(c.table_of("l_discount") == "lineitem");
    CHECK(c.table_of("o_orderkey") == "orders");
    CHECK(c.table_of("r_name") == "region");
    CHECK(c.table_of("no_such_column") == std::nullopt);
    CHECK(c.distinct_of_attr("c_nationkey") == 25);
}

TEST_CASE("column order follows the data-file layout") {
    const Catalog c = Catalog::load_default();
    const TableStats& region = c.table("region");
    REQUIRE(region.attributes.size() == 3);
    CHECK(region.attributes[0].name == "r_regionkey");
    CHECK(region.attributes[1].name == "r_name");
    CHECK(region.attributes[2].name == "r_comment");

    const TableStats& customer = c.table("customer");
    REQUIRE(customer.attributes.size() == 8);
    CHECK(customer.attributes[0].name == "c_custkey");
    CHECK(customer.attributes[1].name == "c_name");
    CHECK(customer.attributes[2].name == "c_address");
    CHECK(customer.attributes[3].name == "c_nationkey");
    CHECK(customer.attributes[5].name == "c_acctbal");

    const TableStats& lineitem = c.table("lineitem");
    REQUIRE(lineitem.attributes.size() == 16);
    CHECK(lineitem.attributes[0].name == "l_orderkey");
    CHECK(lineitem.attributes[4].name == "l_quantity");
    CHECK(lineitem.attributes[6].name == "l_discount");
    CHECK(lineitem.attributes[8].name == "l_returnflag");
    CHECK(lineitem.attributes[14].name == "l_shipmode");
}

TEST_CASE("unknown names are semantic errors") {
    const Catalog c = Catalog::load_default();
    CHECK_THROWS_AS(c.table("parts"), Error);
    CHECK_THROWS_AS(c.distinct_of("region", "r_nothing"), Error);
    CHECK_THROWS_AS(c.distinct_of_attr("bogus"), Error);
    try {
        c.cardinality("parts");
        FAIL("expected a semantic error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::semantic);
    }
}

TEST_CASE("text form round-trips") {
    const Catalog c = Catalog::load_default();
    const Catalog again = Catalog::parse_text(c.to_text());
    CHECK(again == c);
}

TEST_CASE("text form accepts comments and blank lines") {
    const Catalog c = Catalog::parse_text(
        "# two tiny tables\n"
        "table t 10\n"
        "attr a t 4\n"
        "\n"
        "table u 6\n"
        "attr b u 6\n");
    CHECK(c.cardinality("t") == 10);
    CHECK(c.distinct_of("u", "b") == 6);
    CHECK_THROWS_AS(Catalog::parse_text("table t\n"), Error);
    CHECK_THROWS_AS(Catalog::parse_text("attr a ghost 3\n"), Error);
    // Attribute names are globally unique.
    CHECK_THROWS_AS(Catalog::parse_text("table t 1\nattr a t 1\ntable u 1\nattr a u 1\n"),
                    Error);
}

TEST_CASE("file save and load round-trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mqp_catalog_test";
    fs::create_directories(dir);
    const std::string path = (dir / "stats.txt").string();
    const Catalog c = Catalog::load_default();
    c.save_file(path);
    CHECK(Catalog::load_file(path) == c);
    fs::remove_all(dir);
}

TEST_CASE("ingest_tbl measures exact statistics") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mqp_ingest_test";
    fs::create_directories(dir);
    const std::string path = (dir / "pets.tbl").string();
    {
        FILE* f = std::fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs("1|rex|4|\n2|ada|4|\n3|rex|2|\n", f);
        std::fclose(f);
    }
    const TableStats stats =
        Catalog::ingest_tbl(path, "pets", {"pet_id", "pet_name", "pet_legs"});
    CHECK(stats.name == "pets");
    CHECK(stats.cardinality == 3);
    REQUIRE(stats.attributes.size() == 3);
    CHECK(stats.attributes[0].distinct == 3);
    CHECK(stats.attributes[1].distinct == 2);
    CHECK(stats.attributes[2].distinct == 2);
    fs::remove_all(dir);
}

TEST_CASE("generated miniature matches its own measured statistics") {
    namespace fs = std::filesystem;
    const testdata::TestData data = testdata::make();
    REQUIRE(data.catalog.tables().size() == 5);
    CHECK(data.catalog.cardinality("region") == 5);
    CHECK(data.catalog.cardinality("nation") == 25);
    CHECK(data.catalog.cardinality("customer") == 120);
    CHECK(data.catalog.cardinality("orders") == 1500);
    CHECK(data.catalog.cardinality("lineitem") == 6000);

    // Writing the rows out and ingesting them back reproduces the catalog.
    const fs::path dir = fs::temp_directory_path() / "mqp_testdata_roundtrip";
    fs::create_directories(dir);
    data.write_tbl(dir.string());
    for (const auto& table : data.catalog.tables()) {
        std::vector<std::string> attrs;
        for (const auto& a : table.attributes) attrs.push_back(a.name);
        const TableStats measured =
            Catalog::ingest_tbl((dir / (table.name + ".tbl")).string(), table.name, attrs);
        CHECK(measured == table);
    }
    fs::remove_all(dir);
}

TEST_CASE("generated miniature keeps the reference lookups meaningful") {
    const testdata::TestData data = testdata::make();
    size_t named = 0;
    for (const auto& row : data.rows.at("customer"))
        if (row[1].render() == "Customer#000070919") ++named;
    CHECK(named == 1);
    // Every order references an existing customer and every line an order.
    std::set<std::string> custkeys, orderkeys;
    for (const auto& row : data.rows.at("customer")) custkeys.insert(row[0].render());
    for (const auto& row : data.rows.at("orders")) {
        orderkeys.insert(row[0].render());
        CHECK(custkeys.count(row[1].render()) == 1);
    }
    for (const auto& row : data.rows.at("lineitem"))
        CHECK(orderkeys.count(row[0].render()) == 1);
}
