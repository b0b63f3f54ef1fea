// elastic: encrypt/decrypt files and run the diffusion and reduction reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "elastic/container.hpp"
#include "elastic/diffusion.hpp"
#include "elastic/engine.hpp"
#include "elastic/keystream.hpp"
#include "elastic/reduction.hpp"
#include "elastic/vectors.hpp"

using namespace elastic;

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  }
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

template <typename F>
auto with_cipher(CipherId id, F&& f) {
  switch (id) {
    case CipherId::Sp16: return f(Sp16());
    case CipherId::Sp8: return f(Sp8());
  }
  throw Error(ErrorKind::InvalidArgument, "unknown cipher id");
}

struct CryptOptions {
  std::string cipher = "sp16";
  std::string key_hex;
  std::string in;
  std::string out;
  std::string raw_key_hex;
};

ExpandedKey key_for(const CryptOptions& o, const ElasticParams& p, const CipherSpec& spec) {
  if (!o.raw_key_hex.empty()) {
    return ExpandedKey::from_raw(BitString::from_hex(o.raw_key_hex, p.key_bits), p, spec);
  }
  if (o.key_hex.empty()) {
    throw Error(ErrorKind::InvalidArgument, "--key-hex is required");
  }
  return ExpandedKey::derive(MasterKey::from_hex(o.key_hex), p, spec);
}

int cmd_encrypt(const CryptOptions& o) {
  const CipherId id = cipher_id_from_name(o.cipher);
  const auto data = read_file(o.in);
  if (data.empty()) {
    throw Error(ErrorKind::InvalidArgument, "input file is empty");
  }
  const BitString plain = BitString::from_bytes(data);
  const auto bytes = with_cipher(id, [&](const auto& round) {
    const ElasticParams p = init_params(plain.size(), round.spec());
    const BitString ct = encrypt(round, plain, key_for(o, p, round.spec()), p);
    return write_container({id, static_cast<std::uint8_t>(p.level), ct.size()}, ct);
  });
  write_file(o.out, bytes);
  return 0;
}

int cmd_decrypt(const CryptOptions& o) {
  const CipherId id = cipher_id_from_name(o.cipher);
  const Container c = read_container(read_file(o.in));
  if (c.header.cipher != id) {
    throw Error(ErrorKind::BadContainer, std::string("container holds ") +
                                             to_string(c.header.cipher) + ", not " + o.cipher);
  }
  const BitString plain = with_cipher(id, [&](const auto& round) {
    const ElasticParams p = init_params(c.payload.size(), round.spec());
    return decrypt(round, c.payload, key_for(o, p, round.spec()), p);
  });
  if (plain.size() % 8 != 0) {
    throw Error(ErrorKind::BadContainer, "decrypted payload is not whole octets");
  }
  write_file(o.out, plain.to_bytes());
  return 0;
}

int cmd_params(const std::string& cipher, std::size_t len_bits, bool layout) {
  const CipherId id = cipher_id_from_name(cipher);
  return with_cipher(id, [&](const auto& round) {
    const CipherSpec spec = round.spec();
    const ElasticParams p = init_params(len_bits, spec);
    std::cout << "n=" << p.level << " y=" << p.tail_bits << " r=" << p.rounds
              << " lK=" << p.key_bits << '\n'
              << spec.table() << p.table();
    std::cout << "rounds by level (r_m per encryption)\n";
    for (unsigned m = p.level + 1; m-- > 0;) {
      std::cout << "  level " << m << "  " << rounds_at_level(p, m, spec) << '\n';
    }
    std::cout << "E0 round bound r0 2^(n-1) x   "
              << spec.rounds() * (std::size_t{1} << (p.level - 1)) * spec.rounds_per_cycle << '\n';
    std::cout << "cycle key bits g(n-1)        " << cycle_key_bits(spec, p.level - 1) << '\n';
    if (layout) {
      std::cout << ExpandedKey::from_raw(BitString(p.key_bits), p, spec).dump();
    }
    return 0;
  });
}

struct DiffusionOptions {
  std::string cipher = "sp16";
  unsigned level = 1;
  std::size_t tail = 8;
  std::string mode = "sampled";
  std::size_t rounds = 1;
  std::size_t samples = std::size_t{1} << 14;
  std::uint64_t seed = 0xd1ff;
  std::string key_hex = "0102030405";
  std::size_t find_complete = 0;
  bool csv = false;
};

int cmd_diffusion(const DiffusionOptions& o) {
  const CipherId id = cipher_id_from_name(o.cipher);
  Mode mode = Exhaustive{};
  if (o.mode == "sampled") {
    mode = Sampled{o.samples, o.seed};
  } else if (o.mode != "exhaustive") {
    throw Error(ErrorKind::InvalidArgument, "--mode must be exhaustive or sampled");
  }
  return with_cipher(id, [&](const auto& round) {
    const CipherSpec spec = round.spec();
    const ElasticParams base = make_params(o.level, o.tail, spec);
    const std::size_t max_r = std::max(o.rounds, o.find_complete);
    ElasticParams sized = base;
    sized.rounds = std::max<std::size_t>(max_r, 1);
    const BitString material =
        expand(MasterKey::from_hex(o.key_hex), rounds_key_bits(sized, spec));
    auto build = [&](std::size_t r) {
      ElasticParams p = base;
      p.rounds = r;
      return rounds_function(round, p, material);
    };
    if (o.find_complete > 0) {
      const auto res = complete_diffusion_rounds(build, base.block_bits, o.find_complete, mode);
      std::cout << "influenced pairs by round:";
      for (auto c : res.influenced_by_round) {
        std::cout << ' ' << c;
      }
      std::cout << " (of " << base.block_bits * base.block_bits << ")\n";
      if (res.converged) {
        std::cout << "complete diffusion after " << res.rounds << " rounds\n";
      } else {
        std::cout << "no complete diffusion within " << res.rounds << " rounds\n";
      }
      return res.converged ? 0 : 1;
    }
    const InfluenceMatrix m = influence_matrix(build(o.rounds), base.block_bits, mode);
    if (o.csv) {
      std::cout << m.to_csv();
    } else {
      std::cout << "E" << base.level << " over " << spec.name << ", y=" << base.tail_bits << ", "
                << o.rounds << " rounds\n"
                << m.table();
    }
    return 0;
  });
}

struct DistinguishOptions {
  std::size_t trials = std::size_t{1} << 14;
  double threshold = 0.05;
  std::size_t len_bits = 24;
  std::size_t rounds = 1;       // 0: full r_n
  std::size_t base_cycles = 1;  // c0 of the SP16 underneath
  std::uint64_t seed = 0xd15;
  std::string key_hex = "0102030405";
};

int cmd_distinguish(const DistinguishOptions& o) {
  const Sp16 round(o.base_cycles);
  ElasticParams p = init_params(o.len_bits, round.spec());
  if (o.rounds > 0) {
    p = with_rounds(p, o.rounds, round.spec());
  }
  const auto key = ExpandedKey::derive(MasterKey::from_hex(o.key_hex), p, round.spec());
  const auto rep = distinguish(elastic_function(round, p, key), p.block_bits, o.trials,
                               o.threshold, o.seed, p.tail_bits);
  std::cout << "E" << p.level << " over sp16 (c0=" << o.base_cycles << "), " << p.rounds
            << " rounds, " << o.trials << " trials\n"
            << rep.table();
  return 0;
}

int cmd_reduce_demo(std::size_t r, std::size_t s, std::size_t y, std::uint64_t seed,
                    const std::string& planted) {
  const Sp8 sp8;
  const ElasticParams p = with_rounds(make_params(1, y, sp8.spec()), r, sp8.spec());
  const BitString km = expand(MasterKey::from_hex("0102030405"), 64 * (r + 1));
  PlainCipherPairs pairs;
  if (planted == "cycle") {
    std::vector<BitString> keys;
    for (std::size_t t = 0; t < r; ++t) {
      keys.push_back(km.slice(8 * t, 8 * t + 8));
    }
    pairs = planted_cycle_pairs(sp8, 0, keys, s, seed);
  } else if (planted == "elastic") {
    RoundKeySet keys;
    for (std::size_t t = 0; t < r; ++t) {
      const std::size_t at = 16 * t;
      keys.push_back({km.slice(at, at + 8), km.slice(at + 8, at + 8 + y), t % p.half_bits});
    }
    pairs = planted_elastic_pairs(sp8, p, keys, s, seed);
  } else {
    throw Error(ErrorKind::InvalidArgument, "--planted must be cycle or elastic");
  }
  ReductionReport log;
  try {
    const auto rep = reduce(pairs, brute_force_oracle(sp8, p, 10), sp8, p, &log);
    std::cout << "recovered " << rep.cycle_keys.size() << " cycle keys, verified "
              << rep.verified_pairs << '/' << pairs.size() << " pairs\n";
    for (std::size_t t = 0; t < rep.cycle_keys.size(); ++t) {
      std::cout << "  K" << t + 1 << " = " << rep.cycle_keys[t].to_hex() << '\n';
    }
    std::cout << rep.cost.table();
    return rep.verified_pairs == pairs.size() ? 0 : 1;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ReductionFailed) {
      throw;
    }
    std::cout << "reduction failed: " << e.what() << '\n';
    for (std::size_t t = 0; t < log.steps.size(); ++t) {
      std::cout << "  step " << t + 1 << ": " << log.steps[t].rounds << " rounds, "
                << log.steps[t].candidates << " candidates\n";
    }
    std::cout << log.cost.table();
    return 1;
  }
}

int cmd_vectors(const std::string& emit, const std::string& check) {
  if (!check.empty()) {
    const auto data = read_file(check);
    const auto corpus = nlohmann::json::parse(data.begin(), data.end()).get<std::vector<TestVector>>();
    std::size_t ok = 0;
    for (const auto& v : corpus) {
      ok += check_vector(v) ? 1 : 0;
    }
    std::cout << "checked " << ok << '/' << corpus.size() << " vectors\n";
    return ok == corpus.size() ? 0 : 1;
  }
  const std::string text = nlohmann::json(default_corpus()).dump(2) + "\n";
  if (emit.empty() || emit == "-") {
    std::cout << text;
  } else {
    write_file(emit, {text.begin(), text.end()});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic block cipher over toy SPN ciphers"};
  app.require_subcommand(1);

  CryptOptions enc_opts;
  CryptOptions dec_opts;
  auto add_crypt = [&](CLI::App* sub, CryptOptions& o) {
    sub->add_option("--cipher", o.cipher, "sp16 or sp8")->check(CLI::IsMember({"sp16", "sp8"}));
    sub->add_option("--key-hex", o.key_hex, "master key, hex octets");
    sub->add_option("--in", o.in, "input file")->required();
    sub->add_option("--out", o.out, "output file")->required();
    sub->add_option("--raw-expanded-key", o.raw_key_hex)->group("");
  };
  auto* enc = app.add_subcommand("encrypt", "encrypt a file into an ELCX container");
  add_crypt(enc, enc_opts);
  auto* dec = app.add_subcommand("decrypt", "decrypt an ELCX container");
  add_crypt(dec, dec_opts);

  std::string params_cipher = "sp16";
  std::size_t params_len = 0;
  bool params_layout = false;
  auto* params = app.add_subcommand("params", "parameters, round counts and key length");
  params->add_option("--cipher", params_cipher)->check(CLI::IsMember({"sp16", "sp8"}));
  params->add_option("--len-bits", params_len, "message length in bits")->required();
  params->add_flag("--layout", params_layout, "dump the expanded-key layout");

  DiffusionOptions diff_opts;
  auto* diff = app.add_subcommand("diffusion", "influence matrix of E_n rounds");
  diff->add_option("--cipher", diff_opts.cipher)->check(CLI::IsMember({"sp16", "sp8"}));
  diff->add_option("--level", diff_opts.level)->check(CLI::Range(1U, 4U));
  diff->add_option("--tail", diff_opts.tail, "tail bits y");
  diff->add_option("--mode", diff_opts.mode)->check(CLI::IsMember({"exhaustive", "sampled"}));
  diff->add_option("--rounds", diff_opts.rounds, "E_n rounds (0 = identity)");
  diff->add_option("--samples", diff_opts.samples)->check(CLI::PositiveNumber);
  diff->add_option("--seed", diff_opts.seed);
  diff->add_option("--key-hex", diff_opts.key_hex);
  diff->add_option("--find-complete", diff_opts.find_complete,
                   "search the least round count up to this bound");
  diff->add_flag("--csv", diff_opts.csv);

  DistinguishOptions dist_opts;
  auto* dist = app.add_subcommand("distinguish", "tail-window distinguisher on E_n over sp16");
  dist->add_option("--trials", dist_opts.trials)->check(CLI::Range(1000UL, 1UL << 24));
  dist->add_option("--threshold", dist_opts.threshold)->check(CLI::Range(0.0, 0.5));
  dist->add_option("--len-bits", dist_opts.len_bits);
  dist->add_option("--rounds", dist_opts.rounds, "E_n rounds (0 = full r_n)");
  dist->add_option("--base-cycles", dist_opts.base_cycles)->check(CLI::Range(1UL, 8UL));
  dist->add_option("--seed", dist_opts.seed);
  dist->add_option("--key-hex", dist_opts.key_hex);

  std::size_t red_r = 2;
  std::size_t red_s = 4;
  std::size_t red_y = 2;
  std::uint64_t red_seed = 1;
  std::string red_planted = "cycle";
  auto* red = app.add_subcommand("reduce-demo", "key-recovery reduction on sp8, n = 1");
  red->add_option("--r", red_r)->check(CLI::Range(1UL, 2UL));
  red->add_option("--s", red_s)->check(CLI::Range(1UL, 8UL));
  red->add_option("--y", red_y)->check(CLI::Range(0UL, 2UL));
  red->add_option("--seed", red_seed);
  red->add_option("--planted", red_planted, "cycle (E0 keys) or elastic (E1 round keys)")
      ->check(CLI::IsMember({"cycle", "elastic"}));

  std::string vec_emit;
  std::string vec_check;
  auto* vec = app.add_subcommand("vectors", "write or check the JSON test-vector corpus");
  vec->add_option("--emit", vec_emit, "output path, - for stdout");
  vec->add_option("--check", vec_check, "verify a corpus file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enc) return cmd_encrypt(enc_opts);
    if (*dec) return cmd_decrypt(dec_opts);
    if (*params) return cmd_params(params_cipher, params_len, params_layout);
    if (*diff) return cmd_diffusion(diff_opts);
    if (*dist) return cmd_distinguish(dist_opts);
    if (*red) return cmd_reduce_demo(red_r, red_s, red_y, red_seed, red_planted);
    if (*vec) return cmd_vectors(vec_emit, vec_check);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 1;
  }
  return 1;
}
