# Generated by Django 5.2.5 on 2025-09-02 10:14

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ConvergenceRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('family', models.CharField(choices=[('flat_torus', 'Flat torus'), ('genus2_squares', 'Genus two, three squares'), ('genus2_parallelograms', 'Genus two, three parallelograms')], max_length=32)),
                ('eta_re', models.FloatField(blank=True, null=True)),
                ('eta_im', models.FloatField(blank=True, null=True)),
                ('reference', models.JSONField(help_text='Reference period matrix as [re, im] pairs')),
                ('gamma_s', models.FloatField()),
                ('solver_tol', models.FloatField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ConvergenceSample',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('n', models.PositiveIntegerField()),
                ('h', models.FloatField()),
                ('error', models.FloatField()),
                ('scaled_error', models.FloatField()),
                ('pi_t', models.JSONField()),
                ('elapsed_seconds', models.FloatField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='samples', to='experiments.convergencerun')),
            ],
            options={
                'ordering': ['run', 'n'],
                'unique_together': {('run', 'n')},
            },
        ),
    ]
