// Verifier subprocess for tests: answers with the toy checker and can be told
// to misbehave.
//
//   --die-after N   exit without answering the (N+1)-th request
//   --delay-ms D    sleep before each answer
//   --bad-id        answer with an id nobody asked for
//   --garbage       emit an unparseable line before each answer

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "proofsmith/toy_system.hpp"
#include "proofsmith/verifier_server.hpp"

int main(int argc, char** argv) {
  long die_after = -1;
  long delay_ms = 0;
  bool bad_id = false;
  bool garbage = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--die-after") && i + 1 < argc) {
      die_after = std::atol(argv[++i]);
    } else if (!std::strcmp(argv[i], "--delay-ms") && i + 1 < argc) {
      delay_ms = std::atol(argv[++i]);
    } else if (!std::strcmp(argv[i], "--bad-id")) {
      bad_id = true;
    } else if (!std::strcmp(argv[i], "--garbage")) {
      garbage = true;
    }
  }

  proofsmith::toy::ToyVerifier verifier;
  std::string line;
  long answered = 0;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (die_after >= 0 && answered >= die_after) return 3;
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    auto response = proofsmith::handle_verifier_request(verifier, line);
    if (bad_id) response["id"] = "bogus-" + response["id"].get<std::string>();
    if (garbage) std::cout << "not json\n";
    std::cout << response.dump() << "\n" << std::flush;
    ++answered;
  }
  return 0;
}
