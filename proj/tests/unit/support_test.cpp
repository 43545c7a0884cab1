#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"

using namespace semtour;
using namespace semtour::testing;

namespace {

KnowledgeGraph named(std::initializer_list<const char*> ids) {
    KnowledgeGraph g("hand");
    g.add_relation_type({RelationTypeId("r"), "r", {}, false});
    for (const char* id : ids) g.add_entity({EntityId(id), id, EntityKind::norm, {}, {}});
    return g;
}

SemanticTour tour_of(const KnowledgeGraph& g, std::set<EntityId> members, EntityId start) {
    SemanticTour t;
    t.id = TourId("t");
    t.members = std::move(members);
    for (const auto& m : t.members) t.scenes[m] = entity_scene(g.entity(m));
    t.edges = edges_among(g, t.members);
    t.seed = start;
    t.start = start;
    return t;
}

}  // namespace

TEST(Generators, NodeIdsSortNumerically) {
    EXPECT_EQ(node_id(7), EntityId("n0007"));
    EXPECT_LT(node_id(9), node_id(10));
    EXPECT_LT(node_id(99), node_id(100));
}

TEST(Generators, RandomGraphHonoursOptions) {
    Rng rng(1);
    const KnowledgeGraph g = random_graph(rng, {30, 90, 3, true});
    EXPECT_EQ(g.entity_count(), 30u);
    EXPECT_EQ(g.edge_count(), 90u);
    EXPECT_EQ(g.relation_types().size(), 3u);
    EXPECT_TRUE(g.check_integrity());
    for (const auto& [id, e] : g.entities()) EXPECT_TRUE(e.source.has_value());
    for (const auto& [id, e] : g.edges()) EXPECT_NE(e.src, e.dst);
}

TEST(Generators, SameSeedSameGraph) {
    Rng a(5), b(5);
    const KnowledgeGraph ga = random_graph(a, {40, 80, 2, true});
    const KnowledgeGraph gb = random_graph(b, {40, 80, 2, true});
    EXPECT_EQ(ga.edges(), gb.edges());
    EXPECT_EQ(ga.entities(), gb.entities());
}

TEST(Generators, PathAndTreeShapes) {
    Rng rng(2);
    for (std::size_t k : {1u, 2u, 17u}) {
        const KnowledgeGraph p = path_graph(rng, k);
        EXPECT_EQ(p.entity_count(), k);
        EXPECT_EQ(p.edge_count(), k - 1);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            bool linked = false;
            for (const auto& [id, e] : p.edges()) {
                linked |= (e.src == node_id(i) && e.dst == node_id(i + 1)) || (e.src == node_id(i + 1) && e.dst == node_id(i));
            }
            EXPECT_TRUE(linked) << i;
        }
        const KnowledgeGraph t = random_tree(rng, k);
        EXPECT_EQ(t.edge_count(), k - 1);
        std::set<EntityId> all;
        for (const auto& [id, e] : t.entities()) all.insert(id);
        EXPECT_EQ(components_oracle(t, all).size(), 1u);
    }
}

TEST(Generators, ContainmentHasAtMostOneContainer) {
    Rng rng(3);
    const ContainmentGraph cg = containment_graph(rng, 4, 50, 80);
    std::map<EntityId, int> containers;
    for (const auto& [id, e] : cg.graph.edges()) {
        if (e.rel == cg.membership) {
            ++containers[e.src];
            EXPECT_EQ(e.dst.str().front(), 'c');
        }
    }
    for (const auto& [member, n] : containers) EXPECT_EQ(n, 1) << member;
}

TEST(Generators, RandomTourIsValid) {
    Rng rng(4);
    const KnowledgeGraph g = random_graph(rng, {50, 120, 2, true});
    for (int i = 0; i < 20; ++i) {
        const SemanticTour t = random_tour(rng, g, 30);
        EXPECT_FALSE(t.members.empty());
        EXPECT_TRUE(t.contains(t.start));
        EXPECT_TRUE(validate_oracle(t, g).valid());
        EXPECT_EQ(t.edges, edges_among(g, t.members));
    }
}

TEST(Generators, CountingClockTicks) {
    Clock c = counting_clock(10);
    const auto first = c();
    EXPECT_EQ(c(), first + 1);
    EXPECT_EQ(c(), first + 2);
}

TEST(Generators, DerivationsCoverCodesAndSpan) {
    Rng rng(5);
    const std::set<std::string> codes{"StGB", "BGB"};
    std::size_t with_code = 0;
    for (int i = 0; i < 200; ++i) {
        const Derivation d = random_reference(rng, codes);
        EXPECT_EQ(d.expected.source_span, (Span{0, d.text.size()}));
        EXPECT_FALSE(d.expected.section.empty());
        if (!d.expected.code.empty()) {
            ++with_code;
            EXPECT_TRUE(codes.contains(d.expected.code));
        }
    }
    EXPECT_GT(with_code, 100u);
    EXPECT_LT(with_code, 200u);
}

TEST(Oracles, NeighborhoodOnAHandGraph) {
    // a -> b -> c, d -> a
    KnowledgeGraph g = named({"a", "b", "c", "d"});
    g.add_edge(EntityId("a"), EntityId("b"), RelationTypeId("r"), {});
    g.add_edge(EntityId("b"), EntityId("c"), RelationTypeId("r"), {});
    g.add_edge(EntityId("d"), EntityId("a"), RelationTypeId("r"), {});
    using S = std::set<EntityId>;
    EXPECT_EQ(neighborhood_oracle(g, EntityId("a"), 1, Direction::out), (S{EntityId("a"), EntityId("b")}));
    EXPECT_EQ(neighborhood_oracle(g, EntityId("a"), 1, Direction::in), (S{EntityId("a"), EntityId("d")}));
    EXPECT_EQ(neighborhood_oracle(g, EntityId("a"), 2, Direction::out), (S{EntityId("a"), EntityId("b"), EntityId("c")}));
    EXPECT_EQ(neighborhood_oracle(g, EntityId("c"), 3, Direction::both).size(), 4u);
}

TEST(Oracles, InduceOnAHandGraph) {
    // x1, x2 in X; y1 in Y; x1 -> y1, x2 -> y1, y1 -> x1, x1 -> x2 (same container, ignored)
    KnowledgeGraph g("hand");
    const RelationTypeId part("part_of"), ref("refers_to");
    g.add_relation_type({part, "part_of", {}, false});
    g.add_relation_type({ref, "refers_to", {}, false});
    for (const char* id : {"X", "Y", "x1", "x2", "y1"}) g.add_entity({EntityId(id), id, EntityKind::norm, {}, {}});
    g.add_edge(EntityId("x1"), EntityId("X"), part, {});
    g.add_edge(EntityId("x2"), EntityId("X"), part, {});
    g.add_edge(EntityId("y1"), EntityId("Y"), part, {});
    g.add_edge(EntityId("x1"), EntityId("y1"), ref, {});
    g.add_edge(EntityId("x2"), EntityId("y1"), ref, {});
    g.add_edge(EntityId("y1"), EntityId("x1"), ref, {});
    g.add_edge(EntityId("x1"), EntityId("x2"), ref, {});
    const InducedCounts counts = induce_oracle(g, part, ref);
    EXPECT_EQ(counts, (InducedCounts{{{EntityId("X"), EntityId("Y")}, 2}, {{EntityId("Y"), EntityId("X")}, 1}}));
}

TEST(Oracles, DfsOnAHandTour) {
    // a - c, a - b, b - d, e isolated: from a visit b before c
    KnowledgeGraph g = named({"a", "b", "c", "d", "e"});
    g.add_edge(EntityId("c"), EntityId("a"), RelationTypeId("r"), {});
    g.add_edge(EntityId("a"), EntityId("b"), RelationTypeId("r"), {});
    g.add_edge(EntityId("d"), EntityId("b"), RelationTypeId("r"), {});
    std::set<EntityId> all;
    for (const auto& [id, e] : g.entities()) all.insert(id);
    const auto order = dfs_oracle(all, edges_among(g, all), EntityId("c"));
    EXPECT_EQ(order, (std::vector<EntityId>{EntityId("c"), EntityId("a"), EntityId("b"), EntityId("d"), EntityId("e")}));
    EXPECT_EQ(components_oracle(g, all).size(), 2u);
}

TEST(Oracles, LensAndClassifyOnAHandTour) {
    // a -> b -> c -> d
    KnowledgeGraph g = named({"a", "b", "c", "d"});
    g.add_edge(EntityId("a"), EntityId("b"), RelationTypeId("r"), {});
    g.add_edge(EntityId("b"), EntityId("c"), RelationTypeId("r"), {});
    g.add_edge(EntityId("c"), EntityId("d"), RelationTypeId("r"), {});
    const SemanticTour t = tour_of(g, {EntityId("a"), EntityId("b"), EntityId("c"), EntityId("d")}, EntityId("a"));
    const auto lens = lens_oracle(t, EntityId("b"), {EntityId("b")});
    EXPECT_EQ(lens.at(EntityId("a")), FocusLevel::Near);
    EXPECT_EQ(lens.at(EntityId("b")), FocusLevel::Focused);
    EXPECT_EQ(lens.at(EntityId("d")), FocusLevel::Context);
    const auto far = lens_oracle(t, EntityId("a"), {EntityId("a"), EntityId("d")});
    EXPECT_EQ(far.at(EntityId("d")), FocusLevel::Context);

    const std::set<EntityId> visited{EntityId("a"), EntityId("b")};
    EXPECT_EQ(classify_oracle(t, EntityId("b"), visited, EntityId("c")), MoveKind::step);
    EXPECT_EQ(classify_oracle(t, EntityId("c"), visited, EntityId("b")), MoveKind::branch);  // a -> b from visited a
    EXPECT_EQ(classify_oracle(t, EntityId("b"), visited, EntityId("d")), MoveKind::detour);
}

TEST(Oracles, ValidateFlagsEachFaultKind) {
    KnowledgeGraph g = named({"a", "b", "c"});
    const EdgeId ab = g.add_edge(EntityId("a"), EntityId("b"), RelationTypeId("r"), {});
    const EdgeId bc = g.add_edge(EntityId("b"), EntityId("c"), RelationTypeId("r"), {});
    SemanticTour t = tour_of(g, {EntityId("a"), EntityId("b")}, EntityId("a"));
    EXPECT_TRUE(validate_oracle(t, g).valid());
    t.edges.push_back({EntityId("b"), EntityId("c"), bc});  // leaves the member set
    t.edges.push_back({EntityId("b"), EntityId("a"), ab});  // endpoints differ
    t.edges.push_back({EntityId("a"), EntityId("b"), EdgeId("ghost")});
    t.members.insert(EntityId("zz"));
    const ValidationReport r = validate_oracle(t, g);
    EXPECT_EQ(r.bad_edges.size(), 3u);
    EXPECT_EQ(r.foreign_members, (std::vector<EntityId>{EntityId("zz")}));
    EXPECT_EQ(r.members_without_scene, (std::vector<EntityId>{EntityId("zz")}));
}

TEST(Oracles, ScanLogReadsPayloads) {
    const std::vector<ProvenanceEvent> log = {
        {0, 1, EventKind::init, InitPayload{EntityId("a")}},
        {1, 2, EventKind::step, MovePayload{EdgeId("e1"), EntityId("a"), EntityId("b")}},
        {2, 3, EventKind::detour, DetourPayload{EntityId("z"), {EntityId("z")}}},
        {3, 4, EventKind::annotate_task, TaskPayload{1, TaskTag::T5}},
    };
    const VisitScan scan = scan_log(log);
    EXPECT_EQ(scan.entities, (std::set<EntityId>{EntityId("a"), EntityId("b"), EntityId("z")}));
    EXPECT_EQ(scan.edges, (std::set<EdgeId>{EdgeId("e1")}));
    EXPECT_EQ(scan.current, EntityId("z"));
    EXPECT_EQ(scan.tags, (std::map<std::uint64_t, TaskTag>{{1, TaskTag::T5}}));
}

TEST(Oracles, DotParserRejectsMalformedText) {
    EXPECT_TRUE(parse_dot("digraph g {\n  \"a\" [label=\"A\"];\n  \"a\" -> \"a\" [id=\"e\"];\n}\n"));
    const char* bad[] = {
        "graph g {\n}\n",
        "digraph g {\n\"a\" [label=\"A\"];\n}\n",
        "digraph g {\n  \"a\" [label=\"A\"]\n}\n",
        "digraph g {\n  \"a\" -> \"b\" [id=\"e\"];\n  \"c\" [label=\"C\"];\n}\n",
        "digraph g {\n  \"a\" [label=\"A\"];\n",
        "digraph g {\n}",
        "digraph g {\n  a [label=\"A\"];\n}\n",
        "digraph g {\n  \"a\" [label=\"A\", label=\"B\"];\n}\n",
    };
    for (const char* text : bad) {
        std::string why;
        EXPECT_FALSE(parse_dot(text, &why)) << text;
        EXPECT_FALSE(why.empty());
    }
}
