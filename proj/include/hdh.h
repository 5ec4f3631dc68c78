/* hdh - hiding data hiding behind a style-transfer network.
 *
 * C interface over the hdh core: opaque handles, integer status codes,
 * thread-local error messages. All image paths are PNG or JPEG on input;
 * outputs are always PNG.
 */
#ifndef HDH_H
#define HDH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HDH_API __declspec(dllexport)
#else
#define HDH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hdh_status {
  HDH_OK = 0,
  HDH_ERR_CONFIG = 1,     /* invalid configuration value or key */
  HDH_ERR_IO = 2,         /* file missing / unreadable / unwritable */
  HDH_ERR_CAPACITY = 3,   /* payload exceeds (S/N)^2 bits */
  HDH_ERR_ECC = 4,        /* uncorrectable Reed-Solomon codeword */
  HDH_ERR_VERIFY = 5,     /* --verify extraction mismatch */
  HDH_ERR_SHAPE = 6,      /* tensor/image shape mismatch */
  HDH_ERR_CHECKPOINT = 7, /* fingerprint or format mismatch */
  HDH_ERR_INVALID = 8,    /* malformed input */
  HDH_ERR_INTERNAL = 9
} hdh_status;

/* Error-correction setup. scheme: 0 = none, 1 = Reed-Solomon over GF(256). */
typedef struct hdh_ecc {
  int scheme;
  int rs_n; /* codeword bytes, <= 255 */
  int rs_k; /* message bytes, < rs_n */
} hdh_ecc;

typedef struct hdh_model hdh_model;

/* Message for the most recent failing call on this thread. */
HDH_API const char* hdh_last_error(void);
HDH_API const char* hdh_status_name(hdh_status status);

/* ------------------------------------------------------------------ */
/* Model handles                                                       */

HDH_API hdh_status hdh_model_load(const char* checkpoint_dir, hdh_model** out);
HDH_API void hdh_model_free(hdh_model* model);
HDH_API int hdh_model_image_size(const hdh_model* model);
HDH_API int hdh_model_block_size(const hdh_model* model);
/* Payload capacity in bits for a block size; <= 0 block size uses the
 * model's trained block size. Returns -1 on error. */
HDH_API int hdh_model_capacity_bits(const hdh_model* model, int block_size);
HDH_API hdh_status hdh_model_fingerprint(const hdh_model* model, char* buf, size_t cap);

/* ------------------------------------------------------------------ */
/* Workflows                                                           */

/* Embeds payload bytes into a cover image and writes a stego PNG. The
 * payload is framed with a 4-byte big-endian length, optionally ECC-coded,
 * and must fit the (S/N)^2-bit plane. verify != 0 re-extracts through the
 * trigger and fails with HDH_ERR_VERIFY on any mismatch. */
HDH_API hdh_status hdh_embed(hdh_model* model, const char* cover_path, const uint8_t* payload,
                             size_t payload_len, int block_size, const hdh_ecc* ecc,
                             int verify, const char* stego_png_out);

/* Extracts payload bytes from a stego image through the trigger signal.
 * trigger_image, when non-NULL, replaces the built-in trigger (useful for
 * security experiments; expect garbage). raw != 0 returns the packed
 * message-plane bits without deframing or ECC. */
HDH_API hdh_status hdh_extract(hdh_model* model, const char* stego_path, int block_size,
                               const hdh_ecc* ecc, const char* trigger_image, int raw,
                               uint8_t* out, size_t out_cap, size_t* out_len);

/* Style transfer with the model's fixed style image. */
HDH_API hdh_status hdh_style(hdh_model* model, const char* input_path, const char* out_png);

/* ------------------------------------------------------------------ */
/* Dataset handling                                                    */

HDH_API hdh_status hdh_ingest(const char* directory, int image_size, double r_train,
                              double r_val, double r_test, uint64_t seed,
                              const char* manifest_out);
HDH_API hdh_status hdh_synth_dataset(const char* directory, int count, int image_size,
                                     uint64_t seed);

/* ------------------------------------------------------------------ */
/* Training and evaluation (run-configuration driven)                  */

/* Trains per the flat key=value config file; writes best/ and last/
 * checkpoints plus train_log.csv under the configured output_dir.
 * resume != 0 continues from output_dir/last. */
HDH_API hdh_status hdh_train(const char* config_path, int resume);

/* Payload-distortion sweep over block sizes; writes a CSV with one row per
 * actual length. max_images <= 0 uses the whole test split. */
HDH_API hdh_status hdh_sweep(const char* checkpoint_dir, const char* manifest,
                             const int* block_sizes, size_t n_sizes, uint64_t seed,
                             int max_images, const char* out_csv);

/* Mean BER over `trials` extractions that use random natural images instead
 * of the true trigger. */
HDH_API hdh_status hdh_trigger_test(const char* checkpoint_dir, const char* manifest,
                                    int trials, uint64_t seed, double* mean_ber);

/* Mean style-transfer PSNR against ground truth with cover inputs vs. their
 * stego versions. */
HDH_API hdh_status hdh_style_gap(const char* checkpoint_dir, const char* manifest,
                                 uint64_t seed, int max_images, double* psnr_cover,
                                 double* psnr_stego);

/* BER-vs-sigma curves for a plain and a noise-trained checkpoint under
 * additive Gaussian noise on stegos; writes CSV (sigma, ber_plain,
 * ber_noise_trained). */
HDH_API hdh_status hdh_noise_eval(const char* ckpt_plain, const char* ckpt_noise_trained,
                                  const char* manifest, const double* sigmas, size_t n_sigmas,
                                  uint64_t seed, int max_images, const char* out_csv);

/* Trains the lightweight steganalysis detector on cover/stego pairs built
 * from the checkpoint at each block size and writes an accuracy CSV
 * (AL, block_size, accuracy). shuffle_labels != 0 runs the no-signal
 * control. last_accuracy (nullable) receives the final row's accuracy. */
HDH_API hdh_status hdh_detect(const char* checkpoint_dir, const char* manifest,
                              const int* block_sizes, size_t n_sizes, int epochs,
                              uint64_t seed, int max_pairs, int shuffle_labels,
                              const char* out_csv, double* last_accuracy);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HDH_H */
