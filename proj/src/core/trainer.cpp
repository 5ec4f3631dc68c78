#include "trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "metrics.hpp"

namespace fs = std::filesystem;

namespace hdh {

void TrainConfig::validate() const {
  if (learning_rate <= 0) fail(ErrorCode::Config, "learning_rate must be > 0");
  if (adam_beta1 <= 0 || adam_beta1 >= 1 || adam_beta2 <= 0 || adam_beta2 >= 1)
    fail(ErrorCode::Config, "adam betas must lie in (0, 1)");
  if (batch_size < 1) fail(ErrorCode::Config, "batch_size must be >= 1");
  if (epochs < 0) fail(ErrorCode::Config, "epochs must be >= 0");
  if (block_size <= 0 || spec.image_size % block_size != 0)
    fail(ErrorCode::Config, "block_size N=" + std::to_string(block_size) +
                                " must divide image_size S=" + std::to_string(spec.image_size));
  loss.validate();
  for (double s : noise_sigmas)
    if (s < 0) fail(ErrorCode::Config, "noise sigmas must be >= 0");
  spec.validate();
}

Trainer::Trainer(const TrainConfig& cfg, const DatasetSplit& split)
    : cfg_(cfg), split_(split) {
  cfg_.validate();
  if (split_.train.empty()) fail(ErrorCode::Config, "training split is empty");
  net_ = UNet<float>::build(cfg_.spec, cfg_.seed);
  adam_.lr = cfg_.learning_rate;
  adam_.beta1 = cfg_.adam_beta1;
  adam_.beta2 = cfg_.adam_beta2;
  grads_ = net_.make_grads();
  auto spans = net_.param_spans(grads_);
  adam_.init(spans);
  style_y_ = style_image(cfg_.spec.image_size, cfg_.style.params);
  trigger_ = make_trigger(cfg_.spec.image_size, cfg_.trigger_value);
}

uint64_t Trainer::steps_per_epoch() const {
  return std::max<uint64_t>(1, split_.train.size() / uint64_t(cfg_.batch_size));
}

StepBreakdown Trainer::train_step() {
  const int S = cfg_.spec.image_size;
  const int al = actual_length(S, cfg_.block_size);
  const uint64_t spe = steps_per_epoch();
  const uint64_t epoch = step_ / spe;
  const uint64_t step_in_epoch = step_ % spe;

  // Deterministic per-epoch cover permutation.
  std::vector<uint32_t> order(split_.train.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng perm_rng(hash_combine(cfg_.seed, hash_combine(0xe90cULL, epoch)));
  for (size_t i = order.size() - 1; i > 0; --i)
    std::swap(order[i], order[perm_rng.below(i + 1)]);

  StepBreakdown total;
  grads_.zero();
  for (int b = 0; b < cfg_.batch_size; ++b) {
    Rng rng(hash_combine(cfg_.seed, hash_combine(0x57e9ULL, step_ * 64 + uint64_t(b))));
    const uint64_t drop_seed = rng.next_u64();

    const auto& cover_id =
        split_.train[order[(step_in_epoch * cfg_.batch_size + b) % order.size()]];
    const auto& x_id = split_.train[rng.below(split_.train.size())];
    TensorF c = load_split_image(split_, cover_id);
    TensorF x = load_split_image(split_, x_id);
    TensorF z_g = ground_truth_for(x_id, x, cfg_.style, S);

    BitString m_bits(al);
    for (auto& bit : m_bits) bit = rng.coin() ? 1 : 0;
    TensorF m_plane = encode_plane(m_bits, S, cfg_.block_size, cfg_.bit_symbols);

    // Task 1: style transfer.
    UNetTape<float> tape_style;
    TensorF z = net_.forward(x, style_y_, Mode::Train, hash_combine(drop_seed, 1),
                             &tape_style);
    double l_style = norm_distance(z, z_g, cfg_.loss.norm);

    // Task 2: embedding.
    UNetTape<float> tape_embed;
    TensorF s = net_.forward(c, m_plane, Mode::Train, hash_combine(drop_seed, 2),
                             &tape_embed);
    double l_fid = norm_distance(s, c, cfg_.loss.norm);

    // Task 3: extraction, through the composed pass; noise touches only the
    // extraction input, never the fidelity term.
    TensorF s_in = s;
    if (!cfg_.noise_sigmas.empty()) {
      double sigma = cfg_.noise_sigmas[rng.below(cfg_.noise_sigmas.size())];
      for (auto& v : s_in.v) v += float(sigma * rng.gaussian());
    }
    UNetTape<float> tape_extract;
    TensorF m_hat = net_.forward(s_in, trigger_, Mode::Train, hash_combine(drop_seed, 3),
                                 &tape_extract);
    double l_extract = cfg_.loss.alpha1 * norm_distance(m_hat, m_plane, cfg_.loss.norm);

    double l_hide = l_fid + l_extract;
    double l_total = joint_loss(l_style, l_hide, cfg_.loss);
    if (!std::isfinite(l_total)) {
      if (!cfg_.output_dir.empty()) {
        save_state((fs::path(cfg_.output_dir) / "diverged").string());
      }
      fail(ErrorCode::Internal,
           "non-finite loss at step " + std::to_string(step_) + " (style=" +
               std::to_string(l_style) + ", fidelity=" + std::to_string(l_fid) +
               ", extract=" + std::to_string(l_extract) + ")");
    }

    const double inv_batch = 1.0 / cfg_.batch_size;
    TensorF gz = norm_distance_grad(z, z_g, cfg_.loss.norm, inv_batch);
    net_.backward(tape_style, gz, grads_, nullptr, nullptr);

    TensorF gm_hat = norm_distance_grad(m_hat, m_plane, cfg_.loss.norm,
                                        inv_batch * cfg_.loss.alpha2 * cfg_.loss.alpha1);
    TensorF gs_in;
    net_.backward(tape_extract, gm_hat, grads_, &gs_in, nullptr);

    TensorF gs = norm_distance_grad(s, c, cfg_.loss.norm, inv_batch * cfg_.loss.alpha2);
    for (size_t i = 0; i < gs.v.size(); ++i) gs.v[i] += gs_in.v[i];
    net_.backward(tape_embed, gs, grads_, nullptr, nullptr);

    total.l_style += l_style * inv_batch;
    total.l_fidelity += l_fid * inv_batch;
    total.l_extract += l_extract * inv_batch;
    total.l_total += l_total * inv_batch;
  }

  auto spans = net_.param_spans(grads_);
  adam_.step(spans);
  ++step_;
  return total;
}

EpochVal Trainer::validate_epoch(int epoch) const {
  EpochVal ev;
  ev.epoch = epoch;
  const auto& pool = split_.validation.empty() ? split_.train : split_.validation;
  const int S = cfg_.spec.image_size;
  const int al = actual_length(S, cfg_.block_size);
  UNet<float>& net = const_cast<UNet<float>&>(net_);
  double ber_sum = 0, psnr_sum = 0, style_sum = 0;
  for (size_t i = 0; i < pool.size(); ++i) {
    TensorF c = load_split_image(split_, pool[i]);
    BitString bits = random_bits(al, hash_combine(cfg_.seed, hash_combine(epoch, 0xba11ULL + i)));
    TensorF s = embed(net, c, bits, cfg_.block_size, cfg_.bit_symbols);
    BitString got = extract(net, s, cfg_.block_size, cfg_.trigger_value);
    ber_sum += ber(bits, got);
    psnr_sum += psnr(denormalize(c), denormalize(s));
    TensorF z_g = ground_truth_for(pool[i], c, cfg_.style, S);
    TensorF z = net.forward(c, const_cast<Trainer*>(this)->style_y_, Mode::Eval, 0, nullptr);
    style_sum += psnr(denormalize(z_g), denormalize(z));
  }
  ev.ber = ber_sum / double(pool.size());
  ev.stego_psnr = psnr_sum / double(pool.size());
  ev.style_psnr = style_sum / double(pool.size());
  return ev;
}

std::vector<EpochVal> Trainer::train() {
  if (cfg_.output_dir.empty()) fail(ErrorCode::Config, "output_dir is required for train()");
  fs::create_directories(cfg_.output_dir);
  std::ofstream log(fs::path(cfg_.output_dir) / "train_log.csv",
                    step_ > 0 ? std::ios::app : std::ios::out);
  if (!log) fail(ErrorCode::Io, "cannot write training log");
  if (step_ == 0) log << "step,L_style,L_fidelity,L_extract,L_total,wall_time\n";

  std::vector<EpochVal> history;
  const uint64_t spe = steps_per_epoch();
  const uint64_t total_steps = spe * uint64_t(cfg_.epochs);
  const auto t0 = std::chrono::steady_clock::now();

  double best_ber = 2.0, best_psnr = -1.0;
  Checkpoint best;

  while (step_ < total_steps) {
    StepBreakdown sb = train_step();
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << step_ << "," << sb.l_style << "," << sb.l_fidelity << "," << sb.l_extract << ","
        << sb.l_total << "," << wall << "\n";
    if (cfg_.checkpoint_interval > 0 && step_ % cfg_.checkpoint_interval == 0) {
      save_state((fs::path(cfg_.output_dir) / "last").string());
      log.flush();
    }
    if (step_ % spe == 0) {
      int epoch = int(step_ / spe);
      EpochVal ev = validate_epoch(epoch);
      history.push_back(ev);
      std::ofstream vlog(fs::path(cfg_.output_dir) / "val_log.csv",
                         epoch > 1 ? std::ios::app : std::ios::out);
      if (epoch <= 1) vlog << "epoch,ber,stego_psnr,style_psnr\n";
      vlog << epoch << "," << ev.ber << "," << ev.stego_psnr << "," << ev.style_psnr << "\n";
      if (ev.ber < best_ber || (ev.ber == best_ber && ev.stego_psnr > best_psnr)) {
        best_ber = ev.ber;
        best_psnr = ev.stego_psnr;
        best = snapshot();
        save_checkpoint(best, (fs::path(cfg_.output_dir) / "best").string());
      }
      save_state((fs::path(cfg_.output_dir) / "last").string());
      log.flush();
    }
  }
  if (cfg_.epochs == 0) {
    // Contract: returns initialized weights and an empty log.
    save_checkpoint(snapshot(), (fs::path(cfg_.output_dir) / "best").string());
    save_state((fs::path(cfg_.output_dir) / "last").string());
  }
  return history;
}

Checkpoint Trainer::snapshot() const {
  Checkpoint ckpt;
  ckpt.net = net_;
  ckpt.style = cfg_.style.params;
  ckpt.bit_symbols = cfg_.bit_symbols;
  ckpt.trigger_value = cfg_.trigger_value;
  ckpt.block_size = cfg_.block_size;
  ckpt.train_step = step_;
  return ckpt;
}

void Trainer::save_state(const std::string& dir) const {
  save_checkpoint(snapshot(), dir);
  std::ofstream f(fs::path(dir) / "optimizer.bin", std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot write optimizer state in " + dir);
  uint64_t step = step_;
  uint64_t t = const_cast<Adam<float>&>(adam_).step_count();
  f.write(reinterpret_cast<const char*>(&step), 8);
  f.write(reinterpret_cast<const char*>(&t), 8);
  auto& m = const_cast<Adam<float>&>(adam_).moment1();
  auto& v = const_cast<Adam<float>&>(adam_).moment2();
  for (auto* vecs : {&m, &v})
    for (auto& arr : *vecs) {
      uint64_t n = arr.size();
      f.write(reinterpret_cast<const char*>(&n), 8);
      f.write(reinterpret_cast<const char*>(arr.data()), std::streamsize(n * sizeof(float)));
    }
}

void Trainer::load_state(const std::string& dir) {
  Checkpoint ckpt = load_checkpoint(dir);
  if (ckpt.net.spec.fingerprint() != cfg_.spec.fingerprint())
    fail(ErrorCode::Checkpoint, "resume checkpoint does not match the configured spec");
  net_ = ckpt.net;
  std::ifstream f(fs::path(dir) / "optimizer.bin", std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot read optimizer state in " + dir);
  uint64_t step = 0, t = 0;
  f.read(reinterpret_cast<char*>(&step), 8);
  f.read(reinterpret_cast<char*>(&t), 8);
  step_ = step;
  adam_.set_step_count(t);
  for (auto* vecs : {&adam_.moment1(), &adam_.moment2()})
    for (auto& arr : *vecs) {
      uint64_t n = 0;
      f.read(reinterpret_cast<char*>(&n), 8);
      if (n != arr.size()) fail(ErrorCode::Checkpoint, "optimizer state shape mismatch");
      f.read(reinterpret_cast<char*>(arr.data()), std::streamsize(n * sizeof(float)));
    }
  if (!f) fail(ErrorCode::Checkpoint, "truncated optimizer state in " + dir);
}

void Trainer::resume() { load_state((fs::path(cfg_.output_dir) / "last").string()); }

TensorF Trainer::embed(UNet<float>& net, const TensorF& cover, const BitString& bits,
                       int block_size, BitSymbols symbols) {
  TensorF plane = encode_plane(bits, net.spec.image_size, block_size, symbols);
  return net.forward(cover, plane, Mode::Eval, 0, nullptr);
}

BitString Trainer::extract(UNet<float>& net, const TensorF& stego, int block_size,
                           float trigger_value) {
  TensorF trig = make_trigger(net.spec.image_size, trigger_value);
  TensorF m_hat = net.forward(stego, trig, Mode::Eval, 0, nullptr);
  return decode_plane(m_hat, block_size);
}

}  // namespace hdh
