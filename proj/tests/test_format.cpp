#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <json.hpp>

#include "beliefgraph/format.hpp"
#include "support/generators.hpp"

using namespace beliefgraph;
using namespace testsupport;

TEST_CASE("bgl: single declaration parses without warnings") {
    ParseReport report = parse_bgl(R"(belief a { text: "x", cred: 0.9, conf: 0.2 })");
    CHECK(report.warnings.empty());
    REQUIRE(report.system.node_count() == 1);
    const BeliefNode& n = report.system.nodes()[0];
    CHECK(n.id.value == "a");
    CHECK(n.content == "x");
    CHECK(n.cred == 0.9);
    CHECK(n.conf == 0.2);
    CHECK(report.system.edge_count() == 0);
}

TEST_CASE("bgl: defaults produce one warning each, in source order") {
    ParseReport report =
        parse_bgl("belief a {text:\"x\"} belief b {text:\"y\"}\na -| b\n");
    CHECK(report.system.node_count() == 2);
    REQUIRE(report.system.edge_count() == 1);
    const Edge& e = report.system.edges()[0];
    CHECK(e.kind == EdgeKind::Contradiction);
    CHECK(e.weight == 1.0);
    // defaulted: cred(a), conf(a), cred(b), conf(b), weight(a-|b)
    REQUIRE(report.warnings.size() == 5);
    CHECK(report.warnings[0].message == "belief 'a': cred defaulted to 0.5");
    CHECK(report.warnings[4].message == "edge 'a' -> 'b': weight defaulted to 1.0");
    for (std::size_t i = 1; i < report.warnings.size(); ++i) {
        CHECK(std::pair(report.warnings[i - 1].line, report.warnings[i - 1].column) <=
              std::pair(report.warnings[i].line, report.warnings[i].column));
    }
    CHECK(report.warnings[4].line == 2);
}

TEST_CASE("bgl: undeclared endpoint fails at the edge's source position") {
    try {
        parse_bgl("# comment line\na -> b\n");
        FAIL("expected throw");
    } catch (const Error& err) {
        CHECK(err.code() == Errc::DanglingEdgeEndpoint);
        CHECK(err.line == 2);
        CHECK(err.column == 1);
    }
}

TEST_CASE("bgl: duplicate declaration fails at the second occurrence") {
    try {
        parse_bgl("belief a { text: \"x\" }\nbelief a { text: \"y\" }\n");
        FAIL("expected throw");
    } catch (const Error& err) {
        CHECK(err.code() == Errc::DuplicateNodeId);
        CHECK(err.line == 2);
    }
}

TEST_CASE("bgl: syntax errors carry position and expectation") {
    try {
        parse_bgl("belief a { cred: 0.9 }");
        FAIL("expected throw");
    } catch (const Error& err) {
        CHECK(err.code() == Errc::SyntaxError);
        CHECK(err.line == 1);
        CHECK(std::string(err.what()).find("text") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_bgl("a -> "), Error);
    CHECK_THROWS_AS(parse_bgl("a => b"), Error);
    CHECK_THROWS_AS(parse_bgl("belief a { text: \"unterminated }"), Error);
    CHECK_THROWS_AS(parse_bgl("belief a { text: \"x\" } a -> a"), Error);
}

TEST_CASE("bgl: weights, qualification arrows, comments, escapes") {
    ParseReport report = parse_bgl(
        "belief a { text: \"line\\nbreak \\\"q\\\"\", cred: 1, conf: 0 }  # trailing\n"
        "belief b { text: \"y\", cred: 0.25, conf: 0.75 }\n"
        "a ~> b [w=2.5]\n");
    CHECK(report.warnings.empty());
    CHECK(report.system.nodes()[0].content == "line\nbreak \"q\"");
    const Edge& e = report.system.edges()[0];
    CHECK(e.kind == EdgeKind::Qualification);
    CHECK(e.weight == 2.5);
}

TEST_CASE("bgl renderer round-trips and renders warning-free text") {
    std::mt19937 rng(8101);
    for (int round = 0; round < 200; ++round) {
        BeliefSystem sys = random_system(rng);
        ParseReport reparsed = parse_bgl(render_bgl(sys));
        CHECK(reparsed.system == sys);
        CHECK(reparsed.warnings.empty());
    }
}

TEST_CASE("bgl renderer rejects ids outside the identifier grammar") {
    BeliefSystem sys =
        BeliefSystem::build({BeliefNode{NodeId{"not an ident"}, "x", 0.5, 0.5}}, {});
    CHECK_THROWS_AS((void)render_bgl(sys), Error);
}

TEST_CASE("json: empty system serializes to the sorted-key canonical form") {
    CHECK(to_json(BeliefSystem{}) == R"({"edges":[],"metadata":{},"nodes":[]})");
}

TEST_CASE("json: out-of-vocabulary kind is a schema error at the exact path") {
    try {
        from_json(R"({"nodes":[{"id":"a","text":"x"},{"id":"b","text":"y"}],
                      "edges":[{"from":"a","to":"b","kind":"attack"}]})");
        FAIL("expected throw");
    } catch (const Error& err) {
        CHECK(err.code() == Errc::SchemaError);
        CHECK(err.path == "edges[0].kind");
    }
}

TEST_CASE("json: defaults are applied with warnings") {
    ParseReport report = parse_json_document(
        R"({"nodes":[{"id":"a","text":"x"},{"id":"b","text":"y","cred":0.2,"conf":0.8}],
            "edges":[{"from":"a","to":"b"}]})");
    CHECK(report.system.edges()[0].kind == EdgeKind::Support);
    CHECK(report.system.edges()[0].weight == 1.0);
    // cred(a), conf(a), kind, weight
    CHECK(report.warnings.size() == 4);
}

TEST_CASE("json: unknown keys, bad types and malformed text are rejected") {
    CHECK_THROWS_AS(from_json("not json"), Error);
    CHECK_THROWS_AS(from_json("[1,2]"), Error);
    CHECK_THROWS_AS(from_json(R"({"nodes":[{"id":"a","text":"x","wieght":1}]})"), Error);
    CHECK_THROWS_AS(from_json(R"({"nodes":[{"id":7,"text":"x"}]})"), Error);
    CHECK_THROWS_AS(from_json(R"({"nodes":[],"edges":[],"metadata":{"k":3}})"), Error);
    try {
        from_json(R"({"nodes":[{"id":"a","text":"x","cred":1.5}]})");
        FAIL("expected throw");
    } catch (const Error& err) {
        CHECK(err.code() == Errc::ScoreOutOfRange);
        CHECK(err.path == "nodes[0]");
    }
}

TEST_CASE("json round-trip is a structural identity and byte-deterministic") {
    std::mt19937 rng(8102);
    for (int round = 0; round < 200; ++round) {
        BeliefSystem sys = random_system(rng);
        std::string first = to_json(sys);
        BeliefSystem back = from_json(first);
        CHECK(back == sys);
        CHECK(to_json(back) == first);
    }
}

TEST_CASE("json round-trip preserves metadata") {
    BeliefSystem sys = BeliefSystem::build({make_node("a")}, {},
                                           {{"title", "t"}, {"source", "unit test"}});
    BeliefSystem back = from_json(to_json(sys));
    CHECK(back == sys);
    CHECK(back.metadata().at("title") == "t");
}

TEST_CASE("dot: empty graph, kind styles, overlay classes") {
    CHECK(to_dot(BeliefSystem{}) == "digraph belief {\n}\n");

    BeliefSystem sys = system_of({make_node("a"), make_node("b"), make_node("c")},
                                 {make_edge("a", "b", EdgeKind::Contradiction),
                                  make_edge("b", "c", EdgeKind::Qualification),
                                  make_edge("c", "a", EdgeKind::Support, 2.0)});
    std::string dot = to_dot(sys);
    CHECK(dot.find("style=bold, color=red") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
    CHECK(dot.find("style=solid") != std::string::npos);
    CHECK(dot.find("label=\"2\"") != std::string::npos);

    DiagnosticsOverlay overlay;
    overlay.undermined.insert(NodeId{"b"});
    overlay.divergent.insert(NodeId{"a"});
    std::string styled = to_dot(sys, overlay);
    CHECK(styled.find("class=\"undermined\"") != std::string::npos);
    CHECK(styled.find("class=\"divergent\"") != std::string::npos);
    CHECK(styled.find("fillcolor") != std::string::npos);
}

TEST_CASE("graphml: well-formed skeleton with node and edge attributes") {
    BeliefSystem sys = system_of({make_node("a", 0.9, 0.1), make_node("b<&>", 0.5, 0.5)},
                                 {make_edge("a", "b<&>", EdgeKind::Contradiction, 1.5)});
    std::string xml = to_graphml(sys);
    CHECK(xml.find("<graphml") != std::string::npos);
    CHECK(xml.find("b&lt;&amp;&gt;") != std::string::npos);
    CHECK(xml.find("<data key=\"kind\">contradiction</data>") != std::string::npos);
    CHECK(xml.find("<data key=\"weight\">1.5</data>") != std::string::npos);
    // Every opened tag closes.
    auto count = [&](const std::string& needle) {
        std::size_t total = 0, pos = 0;
        while ((pos = xml.find(needle, pos)) != std::string::npos) {
            ++total;
            pos += needle.size();
        }
        return total;
    };
    CHECK(count("<node ") == count("</node>"));
    CHECK(count("<edge ") == count("</edge>"));
    CHECK(count("<data ") == count("</data>"));
}

TEST_CASE("overlay builder reads the report sections it needs") {
    std::string report = R"({
        "coherence": {"undermined": ["x", "y"],
                      "undersupported": [{"node": "z", "reason": "no_support"}]},
        "divergence_assigned": [
            {"node": "d", "class": "credible_unsupported"},
            {"node": "e", "class": "aligned"}]
    })";
    DiagnosticsOverlay overlay = overlay_from_report_json(report);
    CHECK(overlay.undermined == std::set<NodeId>{NodeId{"x"}, NodeId{"y"}});
    CHECK(overlay.undersupported == std::set<NodeId>{NodeId{"z"}});
    CHECK(overlay.divergent == std::set<NodeId>{NodeId{"d"}});
    CHECK_THROWS_AS(overlay_from_report_json("nope"), Error);
}
