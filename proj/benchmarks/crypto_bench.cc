// Copyright 2026 The KeyAuth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "keyauth/crypto.h"

namespace {

using namespace keyauth;

const crypto::KeyPair& pair_for(int bits) {
  static const crypto::KeyPair k2048 = crypto::generate_keypair(2048);
  static const crypto::KeyPair k3072 = crypto::generate_keypair(3072);
  return bits == 2048 ? k2048 : k3072;
}

void BM_Sign(benchmark::State& state) {
  const auto& pair = pair_for(static_cast<int>(state.range(0)));
  const Bytes payload(200, 0x5a);
  for (auto _ : state) benchmark::DoNotOptimize(crypto::sign(pair.private_key, payload));
}
BENCHMARK(BM_Sign)->Arg(2048)->Arg(3072)->Unit(benchmark::kMicrosecond);

void BM_Verify(benchmark::State& state) {
  const auto& pair = pair_for(static_cast<int>(state.range(0)));
  const Bytes payload(200, 0x5a);
  const auto sig = crypto::sign(pair.private_key, payload);
  for (auto _ : state) benchmark::DoNotOptimize(crypto::verify(pair.public_key, payload, sig));
}
BENCHMARK(BM_Verify)->Arg(2048)->Arg(3072)->Unit(benchmark::kMicrosecond);

void BM_Fingerprint(benchmark::State& state) {
  const auto& pair = pair_for(2048);
  for (auto _ : state) benchmark::DoNotOptimize(crypto::fingerprint(pair.public_key));
}
BENCHMARK(BM_Fingerprint);

void BM_GenerateKeyPair(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(crypto::generate_keypair(2048));
}
BENCHMARK(BM_GenerateKeyPair)->Unit(benchmark::kMillisecond)->Iterations(5);

}  // namespace
