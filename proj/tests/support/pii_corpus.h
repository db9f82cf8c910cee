// Copyright 2026 The Report Triage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Hand-built identifier corpus: emails, URLs, ten phone layouts and 6 to 11
// digit ID numbers inside Spanish, English and Portuguese sentences.
#ifndef TRIAGE_TESTS_PII_CORPUS_H_
#define TRIAGE_TESTS_PII_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct PiiCase {
  std::string text;
  std::vector<std::string> planted;
};

namespace detail {

inline std::string digits(std::uint64_t& state, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const auto d = static_cast<char>('0' + (state >> 33) % 10);
    // No leading zero keeps every number a plausible identifier.
    out.push_back(i == 0 && d == '0' ? '7' : d);
  }
  return out;
}

inline std::string phone(std::uint64_t& s, std::size_t layout) {
  const std::string m = "3" + digits(s, 9);
  const std::string l = "60" + digits(s, 8);
  switch (layout % 10) {
    case 0: return "+57 " + m.substr(0, 3) + " " + m.substr(3, 3) + " " + m.substr(6);
    case 1: return m.substr(0, 3) + " " + m.substr(3, 3) + " " + m.substr(6);
    case 2: return m;
    case 3: return "(" + l.substr(0, 3) + ") " + l.substr(3, 3) + " " + l.substr(6);
    case 4: return l.substr(0, 3) + "-" + l.substr(3, 3) + "-" + l.substr(6);
    case 5: return "+57-" + m.substr(0, 3) + "-" + m.substr(3, 3) + "-" + m.substr(6);
    case 6: return "+1 (" + digits(s, 3) + ") " + digits(s, 3) + "-" + digits(s, 4);
    case 7: return m.substr(0, 3) + "." + m.substr(3, 3) + "." + m.substr(6);
    case 8: return "+57" + m;
    default: return digits(s, 3) + " " + digits(s, 2) + " " + digits(s, 2);
  }
}

inline std::string email(std::uint64_t& s, std::size_t v) {
  static const char* users[] = {"ana.p", "juan_23", "x+tag", "MARIA.L",
                                "user-1", "nino.feliz", "c0ntacto"};
  static const char* hosts[] = {"mail.co", "correo.com.co", "sub.example.org",
                                "Hotmail.COM", "uni.edu.co", "gmail.com"};
  return std::string(users[v % 7]) + digits(s, v % 3) + "@" + hosts[v % 6];
}

inline std::string url(std::uint64_t& s, std::size_t v) {
  switch (v % 7) {
    case 0: return "https://x.co/a?b=" + digits(s, 2);
    case 1: return "http://www.sitio.com/perfil/" + digits(s, 4);
    case 2: return "www.red-social.com/u/nina" + digits(s, 2);
    case 3: return "facebook.com/juan.perez." + digits(s, 2);
    case 4: return "https://t.me/canal_" + digits(s, 3);
    case 5: return "instagram.com/ana_" + digits(s, 2) + "?igshid=abc";
    default: return "HTTPS://Grupo.Chat.io/invite/" + digits(s, 5);
  }
}

inline std::string id_number(std::uint64_t& s, std::size_t v) {
  static const char* prefixes[] = {"cc ", "CC ", "cédula ", "TI ", "nit ",
                                   "documento "};
  return std::string(prefixes[v % 6]) + digits(s, 6 + v % 6);
}

}  // namespace detail

inline std::vector<PiiCase> pii_corpus() {
  static const char* frames[] = {
      "escríbeme a %s ya",
      "call me at %s tonight, ok?",
      "mi número es %s por favor",
      "ele mandou fotos para %s ontem",
      "el perfil %s pedía fotos íntimas",
      "niña de 13 años, contacto: %s.",
      "denuncio (%s) porque amenaza con publicar",
      "me pidió dinero al %s; tengo miedo",
      "%s",
      "¿quién es %s? lo vi en el colegio",
  };
  std::vector<PiiCase> cases;
  std::uint64_t state = 2024;
  for (std::size_t i = 0; i < 200; ++i) {
    const std::size_t v = i / 4;
    std::string value;
    switch (i % 4) {
      case 0: value = detail::email(state, v); break;
      case 1: value = detail::url(state, v); break;
      case 2: value = detail::phone(state, v); break;
      default: value = detail::id_number(state, v); break;
    }
    std::string frame = frames[(i * 7) % 10];
    PiiCase c;
    c.text = frame.replace(frame.find("%s"), 2, value);
    // The document-type word before an ID number is not itself identifying.
    c.planted.push_back(i % 4 == 3 ? value.substr(value.rfind(' ') + 1)
                                   : value);
    if (i % 5 == 0) {
      // A second identifier of another kind in the same string.
      const std::string extra = detail::phone(state, v + 3);
      c.text += " y también " + extra + " o " + detail::email(state, v + 1);
      c.planted.push_back(extra);
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace oracle

#endif  // TRIAGE_TESTS_PII_CORPUS_H_
