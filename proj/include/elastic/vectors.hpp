#pragma once

// Requires nlohmann/json (vendor/json.hpp).

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "elastic/container.hpp"
#include "elastic/engine.hpp"
#include "elastic/keystream.hpp"

namespace elastic {

struct TestVector {
  std::string cipher;
  std::string master_key_hex;
  std::string plaintext_hex;
  std::size_t plaintext_bits = 0;
  std::string ciphertext_hex;
  std::size_t ciphertext_bits = 0;
  unsigned n = 0;
  std::size_t y = 0;
  std::size_t r_n = 0;
  std::size_t key_bits = 0;

  friend bool operator==(const TestVector&, const TestVector&) = default;
};

inline void to_json(nlohmann::json& j, const TestVector& v) {
  j = nlohmann::json{{"cipher", v.cipher},
                     {"master_key_hex", v.master_key_hex},
                     {"plaintext_hex", v.plaintext_hex},
                     {"plaintext_bits", v.plaintext_bits},
                     {"ciphertext_hex", v.ciphertext_hex},
                     {"ciphertext_bits", v.ciphertext_bits},
                     {"n", v.n},
                     {"y", v.y},
                     {"r_n", v.r_n},
                     {"l_K", v.key_bits}};
}

inline void from_json(const nlohmann::json& j, TestVector& v) {
  j.at("cipher").get_to(v.cipher);
  j.at("master_key_hex").get_to(v.master_key_hex);
  j.at("plaintext_hex").get_to(v.plaintext_hex);
  j.at("plaintext_bits").get_to(v.plaintext_bits);
  j.at("ciphertext_hex").get_to(v.ciphertext_hex);
  j.at("ciphertext_bits").get_to(v.ciphertext_bits);
  j.at("n").get_to(v.n);
  j.at("y").get_to(v.y);
  j.at("r_n").get_to(v.r_n);
  j.at("l_K").get_to(v.key_bits);
}

inline BitString encrypt_with(CipherId id, const BitString& plain, const MasterKey& key) {
  switch (id) {
    case CipherId::Sp16: return ElasticCipher<Sp16>::for_length(Sp16(), plain.size(), key).encrypt(plain);
    case CipherId::Sp8: return ElasticCipher<Sp8>::for_length(Sp8(), plain.size(), key).encrypt(plain);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown cipher id");
}

inline BitString decrypt_with(CipherId id, const BitString& cipher, const MasterKey& key) {
  switch (id) {
    case CipherId::Sp16: return ElasticCipher<Sp16>::for_length(Sp16(), cipher.size(), key).decrypt(cipher);
    case CipherId::Sp8: return ElasticCipher<Sp8>::for_length(Sp8(), cipher.size(), key).decrypt(cipher);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown cipher id");
}

inline TestVector make_vector(CipherId id, const MasterKey& key, const BitString& plain) {
  const CipherSpec spec = spec_of(id);
  const ElasticParams p = init_params(plain.size(), spec);
  const BitString ct = encrypt_with(id, plain, key);
  return {to_string(id), key.to_hex(),    plain.to_hex(), plain.size(), ct.to_hex(),
          ct.size(),     p.level,         p.tail_bits,    p.rounds,     p.key_bits};
}

// Re-encrypts and checks every field; returns false on any mismatch.
inline bool check_vector(const TestVector& v) {
  const CipherId id = cipher_id_from_name(v.cipher);
  const BitString plain = BitString::from_hex(v.plaintext_hex, v.plaintext_bits);
  return make_vector(id, MasterKey::from_hex(v.master_key_hex), plain) == v;
}

// Deterministic corpus: zero and counting plaintexts at a spread of lengths.
inline std::vector<TestVector> default_corpus() {
  const MasterKey key = MasterKey::from_hex("0102030405");
  std::vector<TestVector> out;
  auto counting = [](std::size_t n) {
    BitString s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.set(i, (i / 3) % 2 == 1);
    }
    return s;
  };
  for (std::size_t len : {24U, 40U, 17U, 33U, 64U, 100U}) {
    out.push_back(make_vector(CipherId::Sp16, key, BitString(len)));
    out.push_back(make_vector(CipherId::Sp16, key, counting(len)));
  }
  for (std::size_t len : {10U, 9U, 16U, 20U}) {
    out.push_back(make_vector(CipherId::Sp8, key, BitString(len)));
  }
  return out;
}

}  // namespace elastic
