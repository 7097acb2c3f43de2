#ifndef BIHARM_TEST_FUZZ_HPP
#define BIHARM_TEST_FUZZ_HPP

// random scenario texts: mutated catalog files, token soup and raw bytes

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "biharm/scenario.hpp"

namespace biharm::fuzz {

inline std::vector<std::string> catalog_texts(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".scn") paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<std::string> out;
    for (const auto& p : paths) out.push_back(read_file(p));
    return out;
}

inline std::string mutate(std::string s, std::mt19937_64& rng) {
    static const std::string alphabet = "[]=\"#,.\n\t +-eE0123456789abcxyz_\\";
    auto pick = [&](size_t n) { return static_cast<size_t>(rng() % std::max<size_t>(n, 1)); };
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits; ++k) {
        switch (rng() % 6) {
            case 0:
                if (!s.empty()) s[pick(s.size())] = alphabet[pick(alphabet.size())];
                break;
            case 1:
                if (!s.empty()) s.erase(pick(s.size()), 1 + pick(8));
                break;
            case 2: s.insert(pick(s.size() + 1), 1, alphabet[pick(alphabet.size())]); break;
            case 3:
                if (!s.empty()) s.resize(pick(s.size()));
                break;
            case 4: {
                // duplicate a line
                size_t a = pick(s.size() + 1);
                size_t b = s.find('\n', a);
                if (b != std::string::npos) s.insert(a, s.substr(a, b - a + 1));
                break;
            }
            case 5: {
                // swap a number for an extreme one
                static const char* ex[] = {"0", "-1", "1e308", "1e-320", "99999999999999999999", "nan", "3", "64", "65"};
                size_t a = s.find_first_of("0123456789", pick(s.size() + 1));
                if (a != std::string::npos) s.replace(a, 1, ex[pick(9)]);
                break;
            }
        }
    }
    return s;
}

inline std::string token_soup(std::mt19937_64& rng) {
    static const char* toks[] = {"[ambient]", "[immersion]", "[sampling]", "[flags]", "[weight]", "[mode]", "kind", "=",
                                 "\"fubini_study\"", "\"u\"", "[", "]", ",", "\n", "grid", "params", "components",
                                 "range.u", "true", "unknown", "4", "0.5", "\"2*pi\"", "#", "\"", "n", "c", "-3"};
    std::string s;
    int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
        s += toks[rng() % (sizeof toks / sizeof *toks)];
        if (rng() % 3 == 0) s += ' ';
    }
    return s;
}

inline std::string raw_bytes(std::mt19937_64& rng) {
    std::string s(rng() % 200, '\0');
    for (auto& c : s) c = static_cast<char>(rng() & 0xff);
    return s;
}

struct FuzzStats {
    int total = 0, parsed = 0, valid = 0, parse_errors = 0, validation_errors = 0;
    std::vector<std::string> unexpected;  // other exception types
};

inline FuzzStats run_fuzz(const std::vector<std::string>& seeds, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FuzzStats st;
    for (int i = 0; i < count; ++i) {
        std::string text;
        auto r = rng() % 10;
        if (r < 6 && !seeds.empty())
            text = mutate(seeds[rng() % seeds.size()], rng);
        else if (r < 8)
            text = token_soup(rng);
        else
            text = raw_bytes(rng);
        st.total++;
        try {
            Scenario sc = bind_scenario(text);
            st.parsed++;
            validate(sc);
            st.valid++;
        } catch (const ScenarioError&) {
            st.parse_errors++;
        } catch (const ValidationError&) {
            st.validation_errors++;
        } catch (const std::exception& e) {
            st.unexpected.push_back(e.what());
        }
    }
    return st;
}

}  // namespace biharm::fuzz

#endif
