// Serves the mock clients over HTTP so the http client mode can be exercised
// without real models.
#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "nlki/http_clients.hpp"
#include "nlki/mock_clients.hpp"
#include "nlki/rng.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mock NLKI service endpoints", "nlki_mock_server"};
    std::string host = "127.0.0.1";
    int port = 8088;
    std::uint64_t seed = 0;
    std::size_t dim = 64;
    int latency_ms = 0;
    app.add_option("--host", host, "Bind address");
    app.add_option("--port", port, "Port");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--dim", dim, "Embedding dimension");
    app.add_option("--latency-ms", latency_ms, "Simulated per-call latency");
    CLI11_PARSE(app, argc, argv);

    const std::chrono::milliseconds latency(latency_ms);
    const nlki::MockEmbedder embedder(dim, nlki::derive_seed(seed, 1));
    const nlki::MockCaptioner captioner(nlki::derive_seed(seed, 2), latency);
    const nlki::MockObjectDetector detector(nlki::derive_seed(seed, 2), latency);
    const nlki::MockExplainer explainer(nlki::derive_seed(seed, 3), latency);
    const nlki::MockReader reader(nlki::derive_seed(seed, 4), latency);

    httplib::Server server;
    nlki::register_service_routes(server, {&embedder, &captioner, &detector, &explainer, &reader});
    std::cerr << "listening on " << host << ":" << port << '\n';
    if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << '\n';
        return 1;
    }
    return 0;
}
