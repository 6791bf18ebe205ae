"""Published values quoted for side-by-side comparison in reports.

None of these are recomputed here; competitor methods (Herd, SBCA, HIBOG)
are not implemented.
"""

# mean, sd of ARI over 250 replicates
SIMULATION_ARI = {
    "kmeans": {"gaussian": (0.808, 0.012), "binomial": (0.865, 0.012),
               "poisson": (0.722, 0.014), "gamma": (0.484, 0.009)},
    "bregman_hard": {"gaussian": (0.837, 0.012), "binomial": (0.886, 0.011),
                     "poisson": (0.882, 0.010), "gamma": (0.868, 0.005)},
    "kmeans_power": {"gaussian": (0.927, 0.003), "binomial": (0.915, 0.004),
                     "poisson": (0.888, 0.006), "gamma": (0.677, 0.008)},
    "bregman_power": {"gaussian": (0.927, 0.003), "binomial": (0.961, 0.003),
                      "poisson": (0.916, 0.004), "gamma": (0.879, 0.004)},
}

# NMI per (source, dataset) for (kmeans, agglomerative, peak)
NMI = {
    "real": {"breast": (0.422, 0.261, 0.166), "digit": (0.738, 0.856, 0.716),
             "iris": (0.748, 0.758, 0.707), "seeds": (0.691, 0.724, 0.706),
             "wine": (0.423, 0.410, 0.384), "wireless": (0.885, 0.906, 0.864)},
    "Herd": {"breast": (0.611, 0.677, 0.408), "digit": (0.740, 0.858, 0.781),
             "iris": (0.752, 0.750, 0.778), "seeds": (0.722, 0.699, 0.705),
             "wine": (0.847, 0.907, 0.697), "wireless": (0.885, 0.862, 0.80)},
    "SBCA": {"breast": (0.611, 0.497, 0.454), "digit": (0.740, 0.849, 0.639),
             "iris": (0.748, 0.786, 0.883), "seeds": (0.730, 0.75, 0.739),
             "wine": (0.874, 0.907, 0.646), "wireless": (0.829, 0.883, 0.867)},
    "HIBOG": {"breast": (0.705, 0.708, 0.502), "digit": (0.882, 0.877, 0.915),
              "iris": (0.813, 0.803, 0.793), "seeds": (0.772, 0.798, 0.726),
              "wine": (0.889, 0.874, 0.863), "wireless": (0.854, 0.878, 0.923)},
    "DBGSA": {"breast": (0.764, 0.781, 0.701), "digit": (0.911, 0.902, 0.913),
              "iris": (0.931, 0.900, 0.949), "seeds": (0.801, 0.803, 0.791),
              "wine": (0.909, 0.877, 0.882), "wireless": (0.922, 0.932, 0.924)},
}

# NMI increment (%) over the unimproved clusterer per (source, dataset)
INCREMENT = {
    "Herd": {"breast": (44.8, 159.4, 145.8), "digit": (0.3, 0.2, 9.1),
             "iris": (0.5, -1.1, 10.0), "seeds": (4.5, -3.5, -0.1),
             "wine": (100.2, 121.2, 81.5), "wireless": (0.0, 4.9, -7.4)},
    "SBCA": {"breast": (44.8, 90.4, 173.5), "digit": (0.3, -0.8, -10.8),
             "iris": (0.0, 3.7, 24.9), "seeds": (5.6, 3.6, 4.7),
             "wine": (106.6, 121.2, 68.2), "wireless": (-6.3, -2.5, 0.3)},
    "HIBOG": {"breast": (67.1, 171.3, 202.4), "digit": (19.5, 2.5, 27.8),
              "iris": (8.7, 5.9, 12.2), "seeds": (11.7, 10.2, 2.8),
              "wine": (110.2, 113.2, 124.7), "wireless": (-3.5, -3.1, 6.8)},
    "DBGSA": {"breast": (80.9, 199.3, 322.3), "digit": (23.4, 5.4, 27.5),
              "iris": (24.4, 18.7, 34.2), "seeds": (15.9, 11.0, 12.0),
              "wine": (114.8, 113.9, 129.7), "wireless": (4.2, 2.9, 6.9)},
}

COMPETITORS = ("Herd", "SBCA", "HIBOG")

# average NMI increment (%) over the six datasets, per (kmeans, agglomerative, peak)
AVERAGE_INCREMENT = {
    "Herd": (25.1, 45.2, 39.8),
    "SBCA": (25.2, 35.9, 43.5),
    "HIBOG": (35.6, 50.0, 62.8),
    "DBGSA": (44.0, 58.5, 88.8),
}

# overall average increment (%) across clusterers and datasets
OVERALL_INCREMENT = {"DBGSA": 63.8, "HIBOG": 49.5, "Herd": 36.7, "SBCA": 34.9}

STUDY_METHODS = ("kmeans", "agglomerative", "peak")
