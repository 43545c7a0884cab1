#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "semtour/json.hpp"
#include "semtour/service.hpp"
#include "semtour/store.hpp"

namespace {

using namespace semtour;

int run_build(const std::string& corpus, const std::string& out, const std::string& graph_id) {
    const CorpusManifest manifest = load_manifest(corpus);
    const auto documents = load_corpus(manifest);
    BuildResult result = build_graph(documents, extractor_config(manifest), graph_id);
    for (const auto& u : result.unresolved) {
        std::cerr << "unresolved reference in " << u.document << " [" << u.reference.source_span.start << ","
                  << u.reference.source_span.end << "): " << u.target << "\n";
    }
    const std::string bytes = save_graph(result.graph);
    write_file(out, bytes);
    std::cout << "documents=" << documents.size() << " entities=" << result.graph.entity_count()
              << " edges=" << result.graph.edge_count() << " unresolved=" << result.unresolved.size()
              << " hash=" << content_hash(bytes) << "\n";
    return 0;
}

int run_serve(const std::string& graph_path, const std::string& corpus, std::optional<int> port_flag,
              const std::string& host) {
    Service service;
    if (!corpus.empty()) {
        const CorpusManifest manifest = load_manifest(corpus);
        service.add_documents(load_corpus(manifest));
    }
    if (!graph_path.empty()) service.add_graph(load_graph(read_file(graph_path)));

    // Block termination signals so the server threads inherit the mask and
    // the main thread can wait for them synchronously.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    HttpServer server(service, {host, resolve_port(port_flag)});
    const int port = server.start();
    std::cout << "serving on http://" << host << ":" << port << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    spdlog::info("signal={} shutting down", received);
    server.stop();
    return 0;
}

int run_export_dot(const std::string& graph_path, const std::string& tour_path) {
    const KnowledgeGraph graph = load_graph(read_file(graph_path));
    if (tour_path.empty()) {
        std::cout << export_dot(graph);
    } else {
        std::cout << export_dot(load_tour(read_file(tour_path)), graph);
    }
    return 0;
}

int run_replay(const std::string& log_path, std::optional<std::uint64_t> from, std::optional<std::uint64_t> to) {
    const auto events = load_session_log(read_file(log_path));
    if (events.empty()) fail(ErrorCode::RangeOutOfBounds, "session log is empty");
    const auto snapshots = replay_range(events, from.value_or(0), to.value_or(events.size() - 1));
    for (const auto& snapshot : snapshots) std::cout << to_json(snapshot).dump() << "\n";
    return 0;
}

int run_seed(const std::string& graph_path, const std::string& document, const std::string& entity, int radius,
             const std::string& out_dir) {
    const KnowledgeGraph graph = load_graph(read_file(graph_path));
    std::vector<SemanticTour> tours;
    if (!document.empty()) {
        tours = seed_from_document(graph, DocumentId(document));
    } else if (!entity.empty()) {
        tours.push_back(seed_from_entity(graph, EntityId(entity), radius));
    } else {
        fail(ErrorCode::InvalidArgument, "seed needs --document or --entity");
    }
    for (const auto& tour : tours) {
        const std::string bytes = save_tour(tour);
        if (out_dir.empty()) {
            std::cout << bytes << "\n";
            continue;
        }
        std::string name = tour.id.str();
        for (char& c : name) {
            if (c == ':' || c == '/') c = '_';
        }
        const auto path = std::filesystem::path(out_dir) / (name + ".json");
        write_file(path, bytes);
        std::cout << tour.id << "\t" << path.string() << "\n";
    }
    return 0;
}

int run_search(const std::string& graph_path, const std::string& q, std::size_t limit) {
    const KnowledgeGraph graph = load_graph(read_file(graph_path));
    for (const auto& hit : search_entities(graph, q, limit)) {
        char score[32];
        std::snprintf(score, sizeof score, "%.3f", hit.score);
        std::cout << hit.entity << "\t" << graph.entity(hit.entity).label << "\t" << score << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    // stdout carries command output; logs go to stderr
    spdlog::set_default_logger(spdlog::stderr_color_mt("semtour"));
    CLI::App app{"semtour: semantic tours over legal knowledge graphs"};
    app.require_subcommand(1);

    std::string corpus, out, graph, tour, log, query, graph_id = "default", host = "127.0.0.1";
    std::optional<int> port;
    std::optional<std::uint64_t> from, to;
    std::size_t limit = 20;

    auto* build = app.add_subcommand("build", "Ingest a corpus manifest and build the knowledge graph");
    build->add_option("--corpus", corpus, "Corpus manifest (JSON)")->required();
    build->add_option("--out", out, "Graph output file")->required();
    build->add_option("--graph-id", graph_id, "Graph id");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--graph", graph, "Graph file to preload");
    serve->add_option("--corpus", corpus, "Corpus manifest to preload");
    serve->add_option("--port", port, "Port (default: $SEMTOUR_PORT, then 8080)");
    serve->add_option("--host", host, "Bind address");

    auto* dot = app.add_subcommand("export-dot", "Print a graph or tour as DOT");
    dot->add_option("--graph", graph, "Graph file")->required();
    dot->add_option("--tour", tour, "Tour file");

    auto* replay = app.add_subcommand("replay", "Print the snapshots of a session log");
    replay->add_option("--session-log", log, "Session log (JSON lines)")->required();
    replay->add_option("--from", from, "First seq");
    replay->add_option("--to", to, "Last seq");

    std::string document, entity, out_dir;
    int radius = 1;
    auto* seed = app.add_subcommand("seed", "Seed tours from a document or an entity");
    seed->add_option("--graph", graph, "Graph file")->required();
    auto* doc_opt = seed->add_option("--document", document, "Document id");
    seed->add_option("--entity", entity, "Entity id")->excludes(doc_opt);
    seed->add_option("--radius", radius, "Neighborhood radius for --entity")->check(CLI::Range(1, 64));
    seed->add_option("--out-dir", out_dir, "Write one tour file per tour here instead of stdout");

    auto* search = app.add_subcommand("search", "Search entity labels");
    search->add_option("--graph", graph, "Graph file")->required();
    search->add_option("--q", query, "Query")->required();
    search->add_option("--limit", limit, "Maximum hits");

    if (argc > 1 && argv[1][0] != '-') {
        bool known = false;
        for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == argv[1];
        if (!known) {
            std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
            return 2;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*build) return run_build(corpus, out, graph_id);
        if (*serve) return run_serve(graph, corpus, port, host);
        if (*dot) return run_export_dot(graph, tour);
        if (*replay) return run_replay(log, from, to);
        if (*seed) return run_seed(graph, document, entity, radius, out_dir);
        if (*search) return run_search(graph, query, limit);
    } catch (const semtour::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
