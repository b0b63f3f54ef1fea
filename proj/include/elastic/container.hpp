#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elastic/bitstring.hpp"
#include "elastic/cipher_core.hpp"
#include "elastic/error.hpp"
#include "elastic/params.hpp"

namespace elastic {

enum class CipherId : std::uint8_t { Sp16 = 1, Sp8 = 2 };

inline CipherId cipher_id_from_name(std::string_view name) {
  if (name == "sp16") return CipherId::Sp16;
  if (name == "sp8") return CipherId::Sp8;
  throw Error(ErrorKind::InvalidArgument, "unknown cipher '" + std::string(name) +
                                              "' (expected sp16 or sp8)");
}

inline const char* to_string(CipherId id) noexcept {
  switch (id) {
    case CipherId::Sp16: return "sp16";
    case CipherId::Sp8: return "sp8";
  }
  return "?";
}

inline CipherSpec spec_of(CipherId id) {
  switch (id) {
    case CipherId::Sp16: return Sp16().spec();
    case CipherId::Sp8: return Sp8().spec();
  }
  throw Error(ErrorKind::BadContainer, "unknown cipher id");
}

// Layout: "ELCX" | version | cipher id | level n | bit length (u64 BE) | payload.
inline constexpr std::array<std::uint8_t, 4> kContainerMagic = {'E', 'L', 'C', 'X'};
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 15;

struct ContainerHeader {
  CipherId cipher = CipherId::Sp16;
  std::uint8_t level = 0;
  std::uint64_t bit_length = 0;

  friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

struct Container {
  ContainerHeader header;
  BitString payload;
};

namespace detail {

inline void check_header(const ContainerHeader& h) {
  const CipherSpec spec = spec_of(h.cipher);
  if (h.bit_length <= spec.block_bits) {
    throw Error(ErrorKind::BadContainer, "payload of " + std::to_string(h.bit_length) +
                                             " bits is not longer than L = " +
                                             std::to_string(spec.block_bits));
  }
  const unsigned expect = init_params(static_cast<std::size_t>(h.bit_length), spec).level;
  if (h.level != expect) {
    throw Error(ErrorKind::BadContainer, "level " + std::to_string(h.level) + " does not match " +
                                             std::to_string(h.bit_length) + "-bit payload (n = " +
                                             std::to_string(expect) + ")");
  }
}

}  // namespace detail

inline std::vector<std::uint8_t> write_container(const ContainerHeader& header,
                                                 const BitString& payload) {
  if (payload.size() != header.bit_length) {
    throw Error(ErrorKind::InvariantViolation, "payload length disagrees with header");
  }
  detail::check_header(header);
  std::vector<std::uint8_t> out(kContainerMagic.begin(), kContainerMagic.end());
  out.push_back(kContainerVersion);
  out.push_back(static_cast<std::uint8_t>(header.cipher));
  out.push_back(header.level);
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(header.bit_length >> shift));
  }
  const auto body = payload.to_bytes();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

inline Container read_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kContainerHeaderBytes) {
    throw Error(ErrorKind::BadContainer, "bad container length: " + std::to_string(bytes.size()) +
                                             " octets is shorter than the header");
  }
  for (std::size_t t = 0; t < kContainerMagic.size(); ++t) {
    if (bytes[t] != kContainerMagic[t]) {
      throw Error(ErrorKind::BadContainer, "bad container magic");
    }
  }
  if (bytes[4] != kContainerVersion) {
    throw Error(ErrorKind::BadContainer, "unsupported container version " +
                                             std::to_string(bytes[4]));
  }
  Container c;
  if (bytes[5] != static_cast<std::uint8_t>(CipherId::Sp16) &&
      bytes[5] != static_cast<std::uint8_t>(CipherId::Sp8)) {
    throw Error(ErrorKind::BadContainer, "unknown cipher id " + std::to_string(bytes[5]));
  }
  c.header.cipher = static_cast<CipherId>(bytes[5]);
  c.header.level = bytes[6];
  for (std::size_t t = 7; t < kContainerHeaderBytes; ++t) {
    c.header.bit_length = (c.header.bit_length << 8) | bytes[t];
  }
  const std::uint64_t body = bytes.size() - kContainerHeaderBytes;
  if (c.header.bit_length > body * 8 || (c.header.bit_length + 7) / 8 != body) {
    throw Error(ErrorKind::BadContainer, "bad container length: header says " +
                                             std::to_string(c.header.bit_length) + " bits, body has " +
                                             std::to_string(body) + " octets");
  }
  detail::check_header(c.header);
  const auto body_bytes = bytes.subspan(kContainerHeaderBytes);
  c.payload = BitString::from_bytes(body_bytes, static_cast<std::size_t>(c.header.bit_length));
  const auto canonical = c.payload.to_bytes();
  if (!std::equal(canonical.begin(), canonical.end(), body_bytes.begin())) {
    throw Error(ErrorKind::BadContainer, "container padding bits are not zero");
  }
  return c;
}

}  // namespace elastic
